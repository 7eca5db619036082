#include "edgewise/weyl.hpp"

#include <algorithm>
#include <cmath>

#include "edgewise/errors.hpp"
#include "edgewise/fft.hpp"

namespace edgewise {

SymbolGrid::SymbolGrid(BoxGrid g, cvec samples)
    : grid_(std::move(g)), samples_(std::move(samples)), cache_(std::make_shared<Cache>()) {
  if (grid_.rank() % 2) throw DimensionError("symbol grid must have even rank");
  if (samples_.size() != grid_.size()) throw DimensionError("symbol samples do not match grid");
  double peak = 0, im = 0;
  for (const auto& v : samples_) {
    peak = std::max(peak, std::abs(v));
    im = std::max(im, std::abs(v.imag()));
  }
  is_real_ = im <= 1e-12 * std::max(1.0, peak);
}

SymbolGrid SymbolGrid::from_function(const BoxGrid& g, const std::function<cplx(const std::vector<double>&)>& fn) {
  cvec s(g.size());
  std::vector<double> p;
  for (std::size_t k = 0; k < s.size(); ++k) {
    g.point(k, p);
    s[k] = fn(p);
  }
  return SymbolGrid(g, std::move(s));
}

const cvec& SymbolGrid::fourier() const {
  std::call_once(cache_->once, [this] { cache_->fhat = edgewise::fourier(samples_, grid_); });
  return cache_->fhat;
}

BoxGrid SymbolGrid::dual_grid() const { return dual_of(grid_); }

BoxGrid dual_of(const BoxGrid& g) {
  std::vector<Axis> ax;
  for (const auto& a : g.axes()) ax.push_back({a.n, a.n / a.len});
  return BoxGrid(ax);
}

SymbolGrid from_fourier(const BoxGrid& g, const cvec& fhat) { return SymbolGrid(g, inverse_fourier(fhat, g)); }

SymbolGrid symplectic_flip(const SymbolGrid& F, bool inverse) {
  const BoxGrid& g = F.grid();
  const int d = F.d();
  std::vector<Axis> ax;
  for (int i = 0; i < d; ++i) ax.push_back(g.axis(d + i));
  for (int i = 0; i < d; ++i) ax.push_back(g.axis(i));
  BoxGrid out_g(ax);
  cvec out(g.size());
  std::vector<int> oi, src(2 * d);
  auto reflect = [](int j, int n) { return (n - j) % n; };
  for (std::size_t k = 0; k < out.size(); ++k) {
    out_g.unravel(k, oi);
    for (int i = 0; i < d; ++i) {
      int xi = oi[i], wi = oi[d + i];
      if (!inverse) {
        // UF(x, w) = F(w, -x)
        src[i] = wi;
        src[d + i] = reflect(xi, g.axis(d + i).n);
      } else {
        // U^{-1}F(x, w) = F(-w, x)
        src[i] = reflect(wi, g.axis(i).n);
        src[d + i] = xi;
      }
    }
    out[k] = F.samples()[g.ravel(src)];
  }
  return SymbolGrid(out_g, std::move(out));
}

namespace {

// Representatives of wrap(i - j) on one axis; two when it sits at -n/2.
struct Reps {
  int count;
  int delta[2];
};

Reps reps_of(int diff, int n) {
  int D = wrap_index(diff, n);
  if (D == -n / 2) return {2, {-n / 2, n / 2}};
  return {1, {D, D}};
}

struct WeylKernel {
  int d, n;
  BoxGrid xg;     // (2n)^d midpoint grid
  int nd;         // n + 1 stored differences per axis
  std::size_t ndd;
  cvec kap;       // kap[m * nd^d + (delta + n/2)]

  cplx entry(const std::vector<int>& i, const std::vector<int>& j) const {
    std::vector<Reps> r(d);
    int combos = 1;
    for (int a = 0; a < d; ++a) {
      r[a] = reps_of(i[a] - j[a], n);
      combos *= r[a].count;
    }
    cplx s = 0;
    std::vector<int> m(d);
    for (int c = 0; c < combos; ++c) {
      int cc = c;
      std::size_t du = 0;
      for (int a = 0; a < d; ++a) {
        int pick = r[a].count == 2 ? (cc & 1) : 0;
        if (r[a].count == 2) cc >>= 1;
        int D = r[a].delta[pick];
        m[a] = ((2 * j[a] + D) % (2 * n) + 2 * n) % (2 * n);
        du = du * nd + static_cast<std::size_t>(D + n / 2);
      }
      s += kap[xg.ravel(m) * ndd + du];
    }
    return s / static_cast<double>(combos);
  }
};

}  // namespace

LinearOperatorHandle quantize(const SymbolGrid& sigma, const GridSpec& target, const QuantizeOptions& opt) {
  if (!(sigma.grid() == weyl_grid(target)))
    throw DimensionError("quantize: symbol must live on the midpoint grid of the target");
  const BoxGrid dual = sigma.dual_grid();
  double tail = boundary_tail(sigma.fourier(), dual);
  if (tail > opt.alias_tol)
    throw ResolutionError("quantize: symbol spectrum reaches the band edge (aliasing)");

  const int d = target.d, n = target.n;
  auto K = std::make_shared<WeylKernel>();
  K->d = d;
  K->n = n;
  K->xg = BoxGrid(std::vector<Axis>(d, Axis{2 * n, target.len}));
  K->nd = n + 1;
  BoxGrid wg(std::vector<Axis>(d, Axis{2 * n, n / target.len}));
  const std::size_t nw = wg.size();
  std::size_t ndd = 1;
  for (int a = 0; a < d; ++a) ndd *= K->nd;
  K->ndd = ndd;
  K->kap.assign(K->xg.size() * ndd, 0);
  cvec row(nw);
  std::vector<int> u, src(d);
  const double norm = 1.0 / static_cast<double>(nw);
  for (std::size_t m = 0; m < K->xg.size(); ++m) {
    std::copy(sigma.samples().begin() + m * nw, sigma.samples().begin() + (m + 1) * nw, row.begin());
    centered_dft(row.data(), wg, +1);
    // keep differences delta in [-n/2, n/2], found at index delta + n
    std::size_t base = m * ndd;
    for (std::size_t q = 0; q < ndd; ++q) {
      std::size_t r = q;
      for (int a = d - 1; a >= 0; --a) {
        src[a] = static_cast<int>(r % K->nd) - n / 2 + n;
        r /= K->nd;
      }
      K->kap[base + q] = row[wg.ravel(src)] * norm;
    }
  }

  BoxGrid sg = target.box();
  const int N = static_cast<int>(sg.size());
  LinearOperatorHandle h;
  if (N <= opt.dense_limit) {
    Eigen::MatrixXcd mat(N, N);
    std::vector<int> ii, jj;
    for (int i = 0; i < N; ++i) {
      sg.unravel(i, ii);
      for (int j = 0; j < N; ++j) {
        sg.unravel(j, jj);
        mat(i, j) = K->entry(ii, jj);
      }
    }
    h = LinearOperatorHandle::from_dense(std::move(mat), false);
  } else {
    h.dim = N;
    h.apply_fn = [K, sg, N](const cplx* in, cplx* out) {
      std::vector<int> ii, jj;
      for (int i = 0; i < N; ++i) {
        sg.unravel(i, ii);
        cplx s = 0;
        for (int j = 0; j < N; ++j) {
          if (in[j] == cplx(0)) continue;
          sg.unravel(j, jj);
          s += K->entry(ii, jj) * in[j];
        }
        out[i] = s;
      }
    };
  }
  if (sigma.is_real()) h.hermitian = hermiticity_defect(h, 2, 11) <= 1e-10;
  return h;
}

LinearOperatorHandle spreading(const SymbolGrid& F, const GridSpec& target) {
  const BoxGrid& g = F.grid();
  const int d = target.d, n = target.n;
  if (F.d() != d) throw DimensionError("spreading: dimension mismatch");
  const double h = target.step(), L = target.len;
  std::vector<int> sx(d), rw(d);
  for (int a = 0; a < d; ++a) {
    double r = g.axis(a).step() / h;
    sx[a] = static_cast<int>(std::lround(r));
    double q = g.axis(d + a).step() * L;
    rw[a] = static_cast<int>(std::lround(q));
    if (sx[a] < 1 || std::abs(r - sx[a]) > 1e-9 * r || rw[a] < 1 || std::abs(q - rw[a]) > 1e-9 * q)
      throw DimensionError("spreading: grid steps must be multiples of h and 1/len");
  }
  BoxGrid xg(std::vector<Axis>(g.axes().begin(), g.axes().begin() + d));
  BoxGrid wg(std::vector<Axis>(g.axes().begin() + d, g.axes().end()));
  BoxGrid sg = target.box();
  const double cell = g.cell();

  double l1 = 0;
  for (const auto& v : F.samples()) l1 += std::abs(v);
  l1 *= cell;

  struct Term {
    std::vector<int> shift;
    cvec v;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  double peak = 0;
  for (const auto& v : F.samples()) peak = std::max(peak, std::abs(v));
  std::vector<int> xi, wi, bin(d);
  std::vector<double> X(d), Om(d);
  cvec buf(sg.size());
  for (std::size_t a = 0; a < xg.size(); ++a) {
    xg.unravel(a, xi);
    bool any = false;
    std::fill(buf.begin(), buf.end(), cplx(0));
    for (int c = 0; c < d; ++c) X[c] = xg.axis(c).node(xi[c]);
    for (std::size_t b = 0; b < wg.size(); ++b) {
      cplx Fv = F.samples()[a * wg.size() + b];
      if (std::abs(Fv) <= 1e-16 * peak) continue;
      any = true;
      wg.unravel(b, wi);
      double xw = 0;
      for (int c = 0; c < d; ++c) {
        Om[c] = wg.axis(c).node(wi[c]);
        xw += X[c] * Om[c];
        // modulation frequency index r = w * L, placed on the centered grid
        bin[c] = wrap_index((wi[c] - wg.axis(c).n / 2) * rw[c], n) + n / 2;
      }
      buf[sg.ravel(bin)] += Fv * cell * std::polar(1.0, -kPi * xw);
    }
    if (!any) continue;
    centered_dft(buf.data(), sg, +1);
    Term t;
    t.shift.resize(d);
    for (int c = 0; c < d; ++c) t.shift[c] = (xi[c] - xg.axis(c).n / 2) * sx[c];
    t.v = buf;
    terms->push_back(std::move(t));
  }
  LinearOperatorHandle op;
  op.dim = static_cast<int>(sg.size());
  op.norm_hint = l1;
  op.apply_fn = [terms, sg, n, d](const cplx* in, cplx* out) {
    std::fill(out, out + sg.size(), cplx(0));
    std::vector<int> ii, jj(d);
    for (std::size_t i = 0; i < sg.size(); ++i) {
      sg.unravel(i, ii);
      cplx s = 0;
      for (const auto& t : *terms) {
        for (int c = 0; c < d; ++c) jj[c] = ((ii[c] - t.shift[c]) % n + n) % n;
        s += t.v[i] * in[sg.ravel(jj)];
      }
      out[i] = s;
    }
  };
  return op;
}

namespace {

double symp(const std::vector<double>& z, const std::vector<double>& zp) {
  const int d = static_cast<int>(z.size()) / 2;
  double s = 0;
  for (int i = 0; i < d; ++i) s += zp[i] * z[d + i] - z[i] * zp[d + i];
  return s;
}

}  // namespace

SymbolGrid twisted_convolution(const SymbolGrid& F, const SymbolGrid& G) {
  if (!(F.grid() == G.grid())) throw DimensionError("twisted convolution: grids differ");
  const BoxGrid& g = F.grid();
  const int D = g.rank();
  auto significant = [](const cvec& a, double& peak) {
    peak = 0;
    for (const auto& v : a) peak = std::max(peak, std::abs(v));
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(a[k]) > 1e-15 * peak) idx.push_back(k);
    return idx;
  };
  double pF, pG;
  auto sF = significant(F.samples(), pF);
  auto sG = significant(G.samples(), pG);
  cvec out(g.size());
  const double cell = g.cell();
  std::vector<int> ia, ib, ic(D);
  std::vector<double> za, zb;
  double lost = 0;
  for (std::size_t a : sF) {
    g.unravel(a, ia);
    g.point(a, za);
    const cplx fa = F.samples()[a] * cell;
    for (std::size_t b : sG) {
      g.unravel(b, ib);
      bool inside = true;
      for (int i = 0; i < D; ++i) {
        ic[i] = ia[i] + ib[i] - g.axis(i).n / 2;
        inside = inside && ic[i] >= 0 && ic[i] < g.axis(i).n;
      }
      const cplx gb = G.samples()[b];
      if (!inside) {
        lost = std::max(lost, std::abs(fa * gb));
        continue;
      }
      g.point(b, zb);
      // kernel exp(-i pi [z - z', z']) with z' = za, z - z' = zb
      out[g.ravel(ic)] += fa * gb * std::polar(1.0, -kPi * symp(zb, za));
    }
  }
  if (lost > 1e-13 * pF * pG * cell) throw WrapError("twisted convolution: support grows beyond the grid");
  return SymbolGrid(g, std::move(out));
}

SymbolGrid twisted_product(const SymbolGrid& sigma, const SymbolGrid& tau) {
  if (!(sigma.grid() == tau.grid())) throw DimensionError("twisted product: grids differ");
  BoxGrid dual = sigma.dual_grid();
  SymbolGrid fs(dual, sigma.fourier()), ft(dual, tau.fourier());
  SymbolGrid prod = twisted_convolution(fs, ft);
  return from_fourier(sigma.grid(), prod.samples());
}

namespace {

// Periodic band-limited interpolation kernel of an axis, Nyquist term as cosine.
double dirichlet(double u, const Axis& a) {
  const double L = a.len;
  const int n = a.n;
  double s = std::sin(kPi * u / L);
  double c = std::cos(kPi * n * u / L);
  if (std::abs(s) < 1e-14) {
    return ((n - 1) + c) / n;
  }
  return (std::sin((n - 1) * kPi * u / L) / s + c) / n;
}

// Applies a dense matrix along one axis of a box array.
cvec apply_axis(const cvec& a, const BoxGrid& g, int axis, const Eigen::MatrixXd& R) {
  cvec out(a.size());
  const int n = g.axis(axis).n;
  const std::size_t st = g.stride(axis);
  const std::size_t outer = a.size() / (st * n);
  Eigen::VectorXcd col(n);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < st; ++in) {
      std::size_t base = o * st * n + in;
      for (int j = 0; j < n; ++j) col(j) = a[base + j * st];
      Eigen::VectorXcd r = R * col;
      for (int j = 0; j < n; ++j) out[base + j * st] = r(j);
    }
  return out;
}

}  // namespace

SymbolGrid dilate(const SymbolGrid& sigma, double a) {
  if (!(a > 0)) throw PreconditionError("dilate: factor must be positive");
  if (a == 1.0) return sigma;
  const BoxGrid& g = sigma.grid();
  cvec cur = sigma.samples();
  for (int ax = 0; ax < g.rank(); ++ax) {
    const Axis& A = g.axis(ax);
    Eigen::MatrixXd R(A.n, A.n);
    for (int j = 0; j < A.n; ++j)
      for (int k = 0; k < A.n; ++k) R(j, k) = dirichlet(a * A.node(j) - A.node(k), A);
    cur = apply_axis(cur, g, ax, R);
  }
  if (sigma.is_real())
    for (auto& v : cur) v = v.real();
  double in_tail = boundary_tail(sigma.samples(), g);
  if (a > 1 && spectral_tail(cur, g) > 1e-8 && spectral_tail(sigma.samples(), g) <= 1e-8)
    throw ResolutionError("dilate: dilated symbol exceeds the grid bandwidth");
  if (a < 1 && in_tail <= 1e-10 && boundary_tail(cur, g) > 1e-8)
    throw ResolutionError("dilate: dilated symbol exceeds the grid box");
  return SymbolGrid(g, std::move(cur));
}

double BumpProfile::operator()(double r) const {
  auto psi = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  if (r <= 1) return 1.0;
  if (r >= 2) return 0.0;
  double a = psi(2 - r), b = psi(r - 1);
  return a / (a + b);
}

std::vector<double> BumpProfile::samples(int count) const {
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) s[i] = (*this)(2.0 * i / (count - 1));
  return s;
}

SymbolGrid fourier_multiply(const SymbolGrid& s, const std::function<double(const std::vector<double>&)>& m) {
  BoxGrid dual = s.dual_grid();
  cvec F = s.fourier();
  std::vector<double> z;
  for (std::size_t k = 0; k < F.size(); ++k) {
    dual.point(k, z);
    F[k] *= m(z);
  }
  cvec out = inverse_fourier(F, s.grid());
  if (s.is_real())
    for (auto& v : out) v = v.real();
  return SymbolGrid(s.grid(), std::move(out));
}

SymbolGrid truncate(const SymbolGrid& sigma, double R, const BumpProfile& theta) {
  if (!(R > 0)) throw PreconditionError("truncate: radius must be positive");
  return fourier_multiply(sigma, [&](const std::vector<double>& z) {
    double r = 0;
    for (double v : z) r += v * v;
    return theta(std::sqrt(r) / R);
  });
}

SymbolGrid heat_smooth(const SymbolGrid& F, double delta) {
  if (!(delta > 0)) throw PreconditionError("heat_smooth: delta must be positive");
  return fourier_multiply(F, [delta](const std::vector<double>& z) {
    double r = 0;
    for (double v : z) r += v * v;
    return std::exp(-kPi * delta * r);
  });
}

NormEstimate fl1_norm(const SymbolGrid& f) { return fourier_l1(f.samples(), f.grid()); }

}  // namespace edgewise
