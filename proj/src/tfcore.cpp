#include "edgewise/tfcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "edgewise/errors.hpp"
#include "edgewise/fft.hpp"
#include "edgewise/io.hpp"

namespace edgewise {

Signal::Signal(GridSpec g, cvec s, std::string l)
    : grid(g), samples(std::move(s)), label(std::move(l)) {
  if (samples.size() != grid.size()) throw DimensionError("sample count does not match grid");
}

Signal Signal::zeros(const GridSpec& g, std::string l) {
  return Signal(g, cvec(g.size()), std::move(l));
}

double Signal::norm() const {
  double s = 0;
  for (const auto& v : samples) s += std::norm(v);
  return std::sqrt(s * std::pow(grid.step(), grid.d));
}

cplx inner(const Signal& f, const Signal& g) {
  if (!(f.grid == g.grid)) throw DimensionError("signals live on different grids");
  cplx s = 0;
  for (std::size_t j = 0; j < f.samples.size(); ++j) s += f.samples[j] * std::conj(g.samples[j]);
  return s * std::pow(f.grid.step(), f.grid.d);
}

PhasePoint::PhasePoint(std::vector<double> x_, std::vector<double> w_)
    : x(std::move(x_)), w(std::move(w_)) {
  if (x.size() != w.size()) throw DimensionError("position and frequency differ in dimension");
}

PhasePoint PhasePoint::zero(int d) { return PhasePoint(std::vector<double>(d), std::vector<double>(d)); }

double PhasePoint::abs() const {
  double s = 0;
  for (int i = 0; i < d(); ++i) s += x[i] * x[i] + w[i] * w[i];
  return std::sqrt(s);
}

PhasePoint PhasePoint::operator+(const PhasePoint& o) const {
  PhasePoint r = *this;
  for (int i = 0; i < d(); ++i) { r.x[i] += o.x[i]; r.w[i] += o.w[i]; }
  return r;
}

PhasePoint PhasePoint::operator-(const PhasePoint& o) const { return *this + (-o); }

PhasePoint PhasePoint::operator-() const { return *this * -1.0; }

PhasePoint PhasePoint::operator*(double s) const {
  PhasePoint r = *this;
  for (int i = 0; i < d(); ++i) { r.x[i] *= s; r.w[i] *= s; }
  return r;
}

double symplectic(const PhasePoint& z, const PhasePoint& zp) {
  if (z.d() != zp.d()) throw DimensionError("phase points differ in dimension");
  double s = 0;
  for (int i = 0; i < z.d(); ++i) s += zp.x[i] * z.w[i] - z.x[i] * zp.w[i];
  return s;
}

double PhaseFunction::l2_norm() const {
  double s = 0;
  for (const auto& v : samples) s += std::norm(v);
  return std::sqrt(s * grid.cell());
}

namespace {

double layer_max(const cvec& a, const BoxGrid& g, double* global) {
  double mx = 0, layer = 0;
  const int r = g.rank();
  std::vector<int> idx(r, 0), n(r);
  for (int i = 0; i < r; ++i) n[i] = g.axis(i).n;
  for (std::size_t f = 0; f < a.size(); ++f) {
    double v = std::abs(a[f]);
    mx = std::max(mx, v);
    if (v > layer) {
      for (int i = 0; i < r; ++i)
        if (idx[i] == 0 || idx[i] == n[i] - 1) { layer = v; break; }
    }
    for (int i = r - 1; i >= 0; --i) {
      if (++idx[i] < n[i]) break;
      idx[i] = 0;
    }
  }
  *global = mx;
  return layer;
}

}  // namespace

double boundary_tail(const cvec& a, const BoxGrid& g) {
  double mx;
  double layer = layer_max(a, g, &mx);
  return mx > 0 ? layer / mx : 0.0;
}

double spectral_tail(const cvec& a, const BoxGrid& g) {
  cvec F = a;
  centered_dft(F.data(), g, -1);
  return boundary_tail(F, g);
}

Signal tf_shift(const Signal& f, const PhasePoint& z) {
  const GridSpec& gs = f.grid;
  if (z.d() != gs.d) throw DimensionError("phase point dimension does not match signal");
  const double nyq = 0.5 / gs.step();
  for (int i = 0; i < gs.d; ++i) {
    if (std::abs(z.x[i]) >= gs.len / 2) throw BoundaryWrapError("translation exceeds half the period");
    if (std::abs(z.w[i]) >= nyq) throw BoundaryWrapError("modulation exceeds the Nyquist frequency");
  }
  BoxGrid g = gs.box();
  cvec F = f.samples;
  centered_dft(F.data(), g, -1);
  std::vector<double> nu, t;
  for (std::size_t k = 0; k < F.size(); ++k) {
    g.frequency(k, nu);
    double ph = 0;
    for (int i = 0; i < gs.d; ++i) ph += nu[i] * z.x[i];
    F[k] *= std::polar(1.0, -2 * kPi * ph);
  }
  centered_dft(F.data(), g, +1);
  double xw = 0;
  for (int i = 0; i < gs.d; ++i) xw += z.x[i] * z.w[i];
  const double scale = 1.0 / static_cast<double>(g.size());
  for (std::size_t k = 0; k < F.size(); ++k) {
    g.point(k, t);
    double ph = -0.5 * xw;
    for (int i = 0; i < gs.d; ++i) ph += z.w[i] * t[i];
    F[k] *= scale * std::polar(1.0, 2 * kPi * ph);
  }
  return Signal(gs, std::move(F), f.label);
}

BoxGrid stft_grid(const GridSpec& g, int xdec, int wdec) {
  if (xdec < 1 || wdec < 1 || g.n % xdec || g.n % wdec)
    throw DimensionError("decimation must divide n");
  std::vector<Axis> ax;
  for (int i = 0; i < g.d; ++i) ax.push_back({g.n / xdec, g.len});
  for (int i = 0; i < g.d; ++i) ax.push_back({g.n / wdec, g.n / g.len});
  return BoxGrid(ax);
}

PhaseFunction stft_box(const cvec& f, const cvec& g, const BoxGrid& sg, const BoxGrid& pgrid) {
  const int d = sg.rank();
  if (f.size() != sg.size() || g.size() != sg.size()) throw DimensionError("stft: samples do not match grid");
  if (pgrid.rank() != 2 * d) throw DimensionError("stft: phase grid rank must be twice the signal rank");

  std::vector<int> sx(d), M(d), n(d);
  for (int i = 0; i < d; ++i) {
    const double h = sg.axis(i).step();
    n[i] = sg.axis(i).n;
    double r = pgrid.axis(i).step() / h;
    sx[i] = static_cast<int>(std::lround(r));
    if (sx[i] < 1 || std::abs(r - sx[i]) > 1e-9 * r)
      throw DimensionError("stft: x step must be a multiple of the signal step");
    double m = 1.0 / (pgrid.axis(d + i).step() * h);
    M[i] = static_cast<int>(std::lround(m));
    if (M[i] < 2 || M[i] % 2 || std::abs(m - M[i]) > 1e-9 * m)
      throw DimensionError("stft: 1/(w step * h) must be an even integer");
  }

  std::vector<Axis> fax;
  for (int i = 0; i < d; ++i) fax.push_back({M[i], M[i] * sg.axis(i).step()});
  BoxGrid fold(fax);
  BoxGrid xg(std::vector<Axis>(pgrid.axes().begin(), pgrid.axes().begin() + d));
  BoxGrid wg(std::vector<Axis>(pgrid.axes().begin() + d, pgrid.axes().end()));

  // support of g; contributions below 1e-18 of the peak are dropped
  double gmax = 0;
  for (const auto& v : g) gmax = std::max(gmax, std::abs(v));
  std::vector<int> supp;  // d indices per support point
  std::vector<cplx> gsupp;
  std::vector<int> idx;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g[j]) > 1e-18 * gmax) {
      sg.unravel(j, idx);
      supp.insert(supp.end(), idx.begin(), idx.end());
      gsupp.push_back(std::conj(g[j]));
    }

  std::vector<int> fidx(d);
  std::vector<std::size_t> wmap(wg.size());
  for (std::size_t k = 0; k < wg.size(); ++k) {
    wg.unravel(k, idx);
    for (int i = 0; i < d; ++i) fidx[i] = wrap_index(idx[i] - wg.axis(i).n / 2, M[i]) + M[i] / 2;
    wmap[k] = fold.ravel(fidx);
  }

  // per-axis tables: signal index -> folded index, and strides of both grids
  std::vector<std::vector<std::size_t>> fcomp(d);
  std::vector<std::size_t> sstride(d), fstride(d);
  for (int i = 0; i < d; ++i) {
    sstride[i] = sg.stride(i);
    fstride[i] = fold.stride(i);
    fcomp[i].resize(n[i]);
    for (int t = 0; t < n[i]; ++t) fcomp[i][t] = (wrap_index(t - n[i] / 2, M[i]) + M[i] / 2) * fstride[i];
  }

  PhaseFunction out{pgrid, cvec(pgrid.size()), std::nullopt};
  const double hd = sg.cell();
  cvec buf(fold.size());
  std::vector<int> xi, off(d);
  for (std::size_t xk = 0; xk < xg.size(); ++xk) {
    xg.unravel(xk, xi);
    for (int i = 0; i < d; ++i) off[i] = (((xi[i] - xg.axis(i).n / 2) * sx[i]) % n[i] + n[i]) % n[i];
    std::fill(buf.begin(), buf.end(), cplx(0));
    const int* sp = supp.data();
    for (std::size_t s = 0; s < gsupp.size(); ++s, sp += d) {
      // t = t_g + x, periodic
      std::size_t sf = 0, ff = 0;
      for (int i = 0; i < d; ++i) {
        int t = sp[i] + off[i];
        if (t >= n[i]) t -= n[i];
        sf += t * sstride[i];
        ff += fcomp[i][t];
      }
      buf[ff] += f[sf] * gsupp[s];
    }
    centered_dft(buf.data(), fold, -1);
    cplx* row = out.samples.data() + xk * wg.size();
    for (std::size_t k = 0; k < wg.size(); ++k) row[k] = hd * buf[wmap[k]];
  }
  out.tail = boundary_tail(out.samples, pgrid);
  return out;
}

PhaseFunction stft(const Signal& f, const Signal& g, const BoxGrid& pgrid) {
  if (!(f.grid == g.grid)) throw DimensionError("stft: f and g live on different grids");
  if (pgrid.rank() != 2 * f.grid.d) throw DimensionError("stft: phase grid rank must be 2d");
  return stft_box(f.samples, g.samples, f.grid.box(), pgrid);
}

namespace {

// Spectral zero padding to 2n samples per axis over the same period.
cvec upsample2(const Signal& f) {
  const GridSpec& gs = f.grid;
  const int d = gs.d, n = gs.n;
  BoxGrid g = gs.box();
  BoxGrid g2(std::vector<Axis>(d, Axis{2 * n, gs.len}));
  cvec F = f.samples;
  centered_dft(F.data(), g, -1);
  cvec U(g2.size());
  std::vector<int> idx, tgt(d);
  for (std::size_t k = 0; k < F.size(); ++k) {
    g.unravel(k, idx);
    // Nyquist bins are split evenly between -n/2 and +n/2.
    int nsplit = 0;
    for (int v : idx) nsplit += (v == 0);
    for (int mask = 0; mask < (1 << nsplit); ++mask) {
      int bit = 0;
      for (int i = 0; i < d; ++i) {
        if (idx[i] == 0)
          tgt[i] = ((mask >> bit++) & 1) ? 3 * n / 2 : n / 2;
        else
          tgt[i] = idx[i] + n / 2;
      }
      U[g2.ravel(tgt)] += F[k] / static_cast<double>(1 << nsplit);
    }
  }
  centered_dft(U.data(), g2, +1);
  const double s = std::pow(static_cast<double>(n), -d);
  for (auto& v : U) v *= s;
  return U;
}

}  // namespace

PhaseFunction wigner(const Signal& f, const Signal& g, bool wrap) {
  if (!(f.grid == g.grid)) throw DimensionError("wigner: f and g live on different grids");
  const GridSpec& gs = f.grid;
  const int d = gs.d, n2 = 2 * gs.n;
  cvec fu = upsample2(f);
  cvec gu = fu;
  if (&f != &g) gu = upsample2(g);
  BoxGrid half(std::vector<Axis>(d, Axis{n2, gs.len}));
  BoxGrid pg = weyl_grid(gs);
  PhaseFunction out{pg, cvec(pg.size()), std::nullopt};
  const double hd = std::pow(gs.step(), d);
  cvec buf(half.size());
  std::vector<int> mi, ui, a(d), b(d);
  for (std::size_t m = 0; m < half.size(); ++m) {
    half.unravel(m, mi);
    for (std::size_t u = 0; u < half.size(); ++u) {
      half.unravel(u, ui);
      bool inside = true;
      for (int i = 0; i < d; ++i) {
        int v = ui[i] - gs.n;
        inside = inside && mi[i] + v >= 0 && mi[i] + v < n2 && mi[i] - v >= 0 && mi[i] - v < n2;
        a[i] = ((mi[i] + v) % n2 + n2) % n2;
        b[i] = ((mi[i] - v) % n2 + n2) % n2;
      }
      buf[u] = wrap || inside ? fu[half.ravel(a)] * std::conj(gu[half.ravel(b)]) : cplx(0);
    }
    centered_dft(buf.data(), half, -1);
    cplx* row = out.samples.data() + m * half.size();
    for (std::size_t l = 0; l < half.size(); ++l) row[l] = hd * buf[l];
  }
  out.tail = boundary_tail(out.samples, pg);
  return out;
}

Interpolant::Interpolant(const Signal& f) : len_(f.grid.len) {
  if (f.grid.d != 1) throw DimensionError("interpolant supports d = 1 only");
  BoxGrid g = f.grid.box();
  coef_ = f.samples;
  centered_dft(coef_.data(), g, -1);
  const int n = f.grid.n;
  for (auto& c : coef_) c /= static_cast<double>(n);
  nu_.resize(n);
  for (int m = 0; m < n; ++m) nu_[m] = g.axis(0).freq(m);
}

cplx Interpolant::operator()(double t) const {
  cplx s = coef_[0] * std::cos(2 * kPi * nu_[0] * t);
  // incremental phase to keep the sum O(n) without n transcendental calls
  const cplx step = std::polar(1.0, 2 * kPi * t / len_);
  cplx ph = std::polar(1.0, 2 * kPi * nu_[1] * t);
  for (std::size_t m = 1; m < coef_.size(); ++m) {
    s += coef_[m] * ph;
    ph *= step;
  }
  return s;
}

PhaseFunction zak(const Signal& f, double a, int nx, int nw) {
  if (f.grid.d != 1) throw DimensionError("zak supports d = 1 only");
  if (!(a > 0) || a > f.grid.len / 2) throw CoverageError("zak: a exceeds half the period");
  if (boundary_tail(f.samples, f.grid.box()) > 1e-12)
    throw ResolutionError("zak: signal does not decay at the grid boundary");
  BoxGrid pg({Axis{nx, a}, Axis{nw, 1.0 / a}});
  Interpolant ip(f);
  PhaseFunction out{pg, cvec(pg.size()), std::nullopt};
  const double half = f.grid.len / 2;
  for (int j = 0; j < nx; ++j) {
    double x = pg.axis(0).node(j);
    int kmin = static_cast<int>(std::ceil((x - half) / a));
    int kmax = static_cast<int>(std::floor((x + half) / a));
    std::vector<std::pair<int, cplx>> terms;
    for (int k = kmin; k <= kmax; ++k) {
      double t = x - a * k;
      if (t < -half || t >= half) continue;
      cplx v = ip(t);
      if (std::abs(v) > 1e-300) terms.emplace_back(k, v);
    }
    for (int l = 0; l < nw; ++l) {
      double w = pg.axis(1).node(l);
      cplx s = 0;
      for (const auto& [k, v] : terms) s += v * std::polar(1.0, 2 * kPi * a * k * w);
      out.samples[static_cast<std::size_t>(j) * nw + l] = s;
    }
  }
  return out;
}

WindowSpec parse_window(const std::string& s) {
  if (s == "gaussian") return {WindowKind::gaussian, 0};
  if (s == "one_sided_exp") return {WindowKind::one_sided_exp, 0};
  if (s == "two_sided_exp") return {WindowKind::two_sided_exp, 0};
  if (s.rfind("hermite", 0) == 0) {
    std::string rest = s.substr(7);
    if (!rest.empty() && rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
    try {
      std::size_t used = 0;
      int k = std::stoi(rest, &used);
      if (used == rest.size() && k >= 0) return {WindowKind::hermite, k};
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("unknown window kind: " + s);
}

std::string to_string(const WindowSpec& w) {
  switch (w.kind) {
    case WindowKind::gaussian: return "gaussian";
    case WindowKind::hermite: return "hermite" + std::to_string(w.order);
    case WindowKind::one_sided_exp: return "one_sided_exp";
    case WindowKind::two_sided_exp: return "two_sided_exp";
  }
  return "?";
}

namespace {

std::vector<double> profile(const WindowSpec& spec, const Axis& ax) {
  std::vector<double> p(ax.n);
  for (int j = 0; j < ax.n; ++j) {
    double t = ax.node(j);
    switch (spec.kind) {
      case WindowKind::gaussian: p[j] = std::pow(2.0, 0.25) * std::exp(-kPi * t * t); break;
      case WindowKind::two_sided_exp: p[j] = std::exp(-std::abs(t)); break;
      case WindowKind::one_sided_exp: p[j] = t > 0 ? std::exp(-t) : (t == 0 ? 0.5 : 0.0); break;
      case WindowKind::hermite: {
        // normalized Hermite functions, h_0 = 2^{1/4} exp(-pi t^2)
        double u = std::sqrt(2 * kPi) * t;
        double hm = 0, hk = std::pow(2.0, 0.25) * std::exp(-kPi * t * t);
        for (int k = 0; k < spec.order; ++k) {
          double hn = std::sqrt(2.0 / (k + 1)) * u * hk - std::sqrt(static_cast<double>(k) / (k + 1)) * hm;
          hm = hk;
          hk = hn;
        }
        p[j] = hk;
        break;
      }
    }
  }
  return p;
}

}  // namespace

Signal make_window(const WindowSpec& spec, const GridSpec& gs) {
  BoxGrid g = gs.box();
  std::vector<double> p = profile(spec, g.axis(0));
  cvec s(g.size());
  std::vector<int> idx;
  for (std::size_t k = 0; k < s.size(); ++k) {
    g.unravel(k, idx);
    double v = 1;
    for (int i : idx) v *= p[i];
    s[k] = v;
  }
  Signal w(gs, std::move(s), to_string(spec));
  if (boundary_tail(w.samples, g) > 1e-12)
    throw ResolutionError("window " + w.label + " is not resolved: boundary tail too large");
  bool smooth = spec.kind == WindowKind::gaussian || spec.kind == WindowKind::hermite;
  if (smooth && spectral_tail(w.samples, g) > 1e-10)
    throw ResolutionError("window " + w.label + " is not resolved: spectral tail too large");
  if (!smooth) {
    double nrm = w.norm();
    for (auto& v : w.samples) v /= nrm;
  }
  return w;
}

static_assert(std::endian::native == std::endian::little, "container I/O assumes little-endian");

namespace {

template <class T>
void put(std::ofstream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& i) {
  T v{};
  if (!i.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("truncated container");
  return v;
}

}  // namespace

void write_container(const std::string& path, const BoxGrid& g, int d, const cvec& data) {
  if (data.size() != g.size()) throw DimensionError("container payload does not match grid");
  std::ofstream o(path, std::ios::binary);
  if (!o) throw ConfigError("cannot write " + path);
  o.write("EDGW", 4);
  put<std::uint32_t>(o, 1);
  put<std::uint32_t>(o, 1);
  put<std::uint32_t>(o, static_cast<std::uint32_t>(d));
  put<std::uint32_t>(o, static_cast<std::uint32_t>(g.rank()));
  for (const auto& a : g.axes()) {
    put<std::uint32_t>(o, static_cast<std::uint32_t>(a.n));
    put<double>(o, a.len);
  }
  o.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(cplx)));
}

ContainerData read_container(const std::string& path) {
  std::ifstream i(path, std::ios::binary);
  if (!i) throw ConfigError("cannot read " + path);
  char magic[4];
  if (!i.read(magic, 4) || std::memcmp(magic, "EDGW", 4) != 0) throw ConfigError("not an EDGW container");
  if (get<std::uint32_t>(i) != 1) throw ConfigError("unsupported container version");
  if (get<std::uint32_t>(i) != 1) throw ConfigError("unsupported container dtype");
  ContainerData c;
  c.d = static_cast<int>(get<std::uint32_t>(i));
  auto rank = get<std::uint32_t>(i);
  std::vector<Axis> ax;
  for (std::uint32_t k = 0; k < rank; ++k) {
    int n = static_cast<int>(get<std::uint32_t>(i));
    double len = get<double>(i);
    ax.push_back({n, len});
  }
  c.grid = BoxGrid(ax);
  c.data.resize(c.grid.size());
  if (!i.read(reinterpret_cast<char*>(c.data.data()),
              static_cast<std::streamsize>(c.data.size() * sizeof(cplx))))
    throw ConfigError("truncated container payload");
  return c;
}

void save(const std::string& path, const Signal& f) {
  write_container(path, f.grid.box(), f.grid.d, f.samples);
}

void save(const std::string& path, const PhaseFunction& F) {
  write_container(path, F.grid, F.d(), F.samples);
}

Signal load_signal(const std::string& path) {
  ContainerData c = read_container(path);
  if (c.grid.rank() != c.d) throw ConfigError("container does not hold a signal");
  for (const auto& a : c.grid.axes())
    if (!(a == c.grid.axis(0))) throw ConfigError("signal container must have equal axes");
  return Signal(GridSpec(c.d, c.grid.axis(0).n, c.grid.axis(0).len), std::move(c.data));
}

PhaseFunction load_phase_function(const std::string& path) {
  ContainerData c = read_container(path);
  if (c.grid.rank() != 2 * c.d) throw ConfigError("container does not hold a phase function");
  return PhaseFunction{c.grid, std::move(c.data), std::nullopt};
}

void write_csv(const std::string& path, const BoxGrid& g, const cvec& data) {
  std::vector<std::string> head;
  for (int i = 0; i < g.rank(); ++i) head.push_back("c" + std::to_string(i));
  head.push_back("re");
  head.push_back("im");
  std::vector<std::vector<double>> rows;
  rows.reserve(data.size());
  std::vector<double> p;
  for (std::size_t k = 0; k < data.size(); ++k) {
    g.point(k, p);
    p.push_back(data[k].real());
    p.push_back(data[k].imag());
    rows.push_back(p);
  }
  write_csv_rows(path, head, rows);
}

}  // namespace edgewise
