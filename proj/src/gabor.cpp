#include "edgewise/gabor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "edgewise/errors.hpp"
#include "edgewise/fft.hpp"
#include "edgewise/io.hpp"

namespace edgewise {

namespace {

using json = nlohmann::json;

std::string describe(const PhasePoint& z) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < z.x.size(); ++i) os << (i ? ", " : "") << z.x[i];
  for (double w : z.w) os << ", " << w;
  os << ")";
  return os.str();
}

// Atoms as scaled columns; throws with the offending points if any atom leaks.
Eigen::MatrixXcd atoms(const Signal& g, const std::vector<PhasePoint>& pts, double tail_tol) {
  const BoxGrid box = g.grid.box();
  const double sh = std::pow(g.grid.step(), 0.5 * g.grid.d);
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(g.samples.size()), static_cast<Eigen::Index>(pts.size()));
  std::vector<std::string> bad;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (pts[j].d() != g.grid.d) throw DimensionError("gabor: point and window dimensions differ");
    Signal a = tf_shift(g, pts[j]);
    if (boundary_tail(a.samples, box) > tail_tol || spectral_tail(a.samples, box) > tail_tol) {
      if (bad.size() < 8) bad.push_back(describe(pts[j]));
      else if (bad.size() == 8) bad.push_back("...");
      continue;
    }
    for (std::size_t i = 0; i < a.samples.size(); ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sh * a.samples[i];
  }
  if (!bad.empty()) {
    std::string msg = "gabor: atoms leave the grid box at";
    for (auto& s : bad) msg += " " + s;
    throw BoundaryWrapError(msg);
  }
  return A;
}

// mu^(zeta) = sum_lambda exp(-2 pi i zeta . lambda) on the dual of g
cvec measure_transform(const BoxGrid& g, const std::vector<PhasePoint>& pts) {
  const BoxGrid dual = dual_of(g);
  const int D = g.rank();
  cvec out(g.size(), 0.0);
  std::vector<cvec> fac(D);
  std::vector<int> idx(D);
  for (const auto& z : pts) {
    for (int a = 0; a < D; ++a) {
      double c = a < D / 2 ? z.x[a] : z.w[a - D / 2];
      const Axis& ax = dual.axis(a);
      fac[a].resize(ax.n);
      for (int j = 0; j < ax.n; ++j) fac[a][j] = std::polar(1.0, -2 * kPi * ax.node(j) * c);
    }
    if (D == 2) {
      const int n0 = dual.axis(0).n, n1 = dual.axis(1).n;
      for (int i = 0; i < n0; ++i) {
        const cplx f0 = fac[0][i];
        cplx* row = out.data() + std::size_t(i) * n1;
        for (int j = 0; j < n1; ++j) row[j] += f0 * fac[1][j];
      }
    } else {
      for (std::size_t k = 0; k < out.size(); ++k) {
        dual.unravel(k, idx);
        cplx v = 1;
        for (int a = 0; a < D; ++a) v *= fac[a][idx[a]];
        out[k] += v;
      }
    }
  }
  return out;
}

void check_inside(const BoxGrid& g, const std::vector<PhasePoint>& pts, double margin, const char* what) {
  const int d = g.rank() / 2;
  std::vector<std::string> bad;
  for (const auto& z : pts) {
    bool ok = true;
    for (int i = 0; i < d; ++i) {
      ok = ok && std::abs(z.x[i]) + margin <= g.axis(i).len / 2;
      ok = ok && std::abs(z.w[i]) + margin <= g.axis(d + i).len / 2;
    }
    if (!ok && bad.size() < 8) bad.push_back(describe(z));
  }
  if (!bad.empty()) {
    std::string msg = std::string(what) + ": points too close to the symbol box edge";
    for (auto& s : bad) msg += " " + s;
    throw BoundaryWrapError(msg);
  }
}

// mu * F on the grid of F
SymbolGrid convolve_measure(const SymbolGrid& F, const std::vector<PhasePoint>& pts) {
  cvec fhat = F.fourier();
  cvec mu = measure_transform(F.grid(), pts);
  for (std::size_t k = 0; k < fhat.size(); ++k) fhat[k] *= mu[k];
  cvec out = inverse_fourier(fhat, F.grid());
  if (F.is_real())
    for (auto& v : out) v = v.real();
  return SymbolGrid(F.grid(), std::move(out));
}

SymbolGrid wigner_symbol(const Signal& g) { return SymbolGrid::from_phase_function(wigner(g, g, false)); }

// z . grad F
SymbolGrid euler_derivative(const SymbolGrid& F) {
  const BoxGrid& g = F.grid();
  const BoxGrid dual = F.dual_grid();
  cvec acc(g.size(), 0.0);
  std::vector<double> z;
  for (int a = 0; a < g.rank(); ++a) {
    cvec fhat = F.fourier();
    for (std::size_t k = 0; k < fhat.size(); ++k) {
      dual.point(k, z);
      fhat[k] *= cplx(0, 2 * kPi * z[a]);
    }
    cvec da = inverse_fourier(fhat, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      g.point(k, z);
      acc[k] += z[a] * da[k];
    }
  }
  if (F.is_real())
    for (auto& v : acc) v = v.real();
  return SymbolGrid(g, std::move(acc));
}

std::vector<PhasePoint> in_section(const std::vector<PhasePoint>& pts, double T) {
  std::vector<PhasePoint> out;
  for (const auto& z : pts) {
    bool ok = true;
    for (double v : z.x) ok = ok && std::abs(v) <= T + 1e-12;
    for (double v : z.w) ok = ok && std::abs(v) <= T + 1e-12;
    if (ok) out.push_back(z);
  }
  return out;
}

}  // namespace

GaborSystem::GaborSystem(Signal g, PointSet p, double a, bool non_unit)
    : window(std::move(g)), pts(std::move(p)), alpha(a), allow_non_unit(non_unit) {
  if (!(alpha > 0)) throw PreconditionError("gabor: alpha must be positive");
  if (pts.size() && pts.d() != window.grid.d) throw DimensionError("gabor: point and window dimensions differ");
  if (!allow_non_unit && std::abs(window.norm() - 1) > 1e-6)
    throw PreconditionError("gabor: window must have unit L2 norm (or set allow_non_unit)");
}

std::vector<PhasePoint> GaborSystem::scaled_points() const {
  std::vector<PhasePoint> out;
  out.reserve(pts.size());
  for (const auto& z : pts.points) out.push_back(z * alpha);
  return out;
}

void check_atoms(const GaborSystem& sys) { atoms(sys.window, sys.scaled_points(), sys.tail_tol); }

Eigen::MatrixXcd atom_matrix(const GaborSystem& sys) { return atoms(sys.window, sys.scaled_points(), sys.tail_tol); }

Signal frame_apply(const GaborSystem& sys, const Signal& f) {
  if (!(f.grid == sys.window.grid)) throw DimensionError("frame_apply: signal grid differs from the window grid");
  Eigen::MatrixXcd A = atom_matrix(sys);
  Eigen::Map<const Eigen::VectorXcd> v(f.samples.data(), static_cast<Eigen::Index>(f.samples.size()));
  Eigen::VectorXcd out = A * (A.adjoint() * v);
  return Signal(f.grid, cvec(out.data(), out.data() + out.size()), "frame");
}

LinearOperatorHandle frame_operator(const GaborSystem& sys) {
  auto A = std::make_shared<const Eigen::MatrixXcd>(atom_matrix(sys));
  const int n = static_cast<int>(A->rows());
  LinearOperatorHandle op;
  op.dim = n;
  op.hermitian = true;
  op.apply_fn = [A, n](const cplx* in, cplx* out) {
    Eigen::Map<const Eigen::VectorXcd> v(in, n);
    Eigen::Map<Eigen::VectorXcd> w(out, n);
    w = *A * (A->adjoint() * v);
  };
  op.norm_hint = A->squaredNorm();  // trace bounds the largest eigenvalue
  return op;
}

SymbolGrid frame_symbol(const GaborSystem& sys) {
  SymbolGrid W = wigner_symbol(sys.window);
  auto pts = sys.scaled_points();
  check_inside(W.grid(), pts, 3.0, "frame_symbol");
  return convolve_measure(W, pts);
}

SymbolGrid dilated_symbol(const GaborSystem& sys, double delta) {
  if (!(std::abs(delta) < 1)) throw PreconditionError("dilated_symbol: need |delta| < 1");
  SymbolGrid W = wigner_symbol(sys.window);
  check_inside(W.grid(), sys.pts.points, 3.0, "dilated_symbol");
  return convolve_measure(dilate(W, 1 / std::sqrt(1 + delta)), sys.pts.points);
}

SymbolGrid dilated_symbol_derivative(const GaborSystem& sys, double delta) {
  if (!(std::abs(delta) < 1)) throw PreconditionError("dilated_symbol: need |delta| < 1");
  SymbolGrid W = wigner_symbol(sys.window);
  check_inside(W.grid(), sys.pts.points, 3.0, "dilated_symbol");
  SymbolGrid E = convolve_measure(dilate(euler_derivative(W), 1 / std::sqrt(1 + delta)), sys.pts.points);
  cvec s = E.samples();
  const double c = -1 / (2 * (1 + delta));
  for (auto& v : s) v *= c;
  return SymbolGrid(E.grid(), std::move(s));
}

SymbolNorms symbol_norms(const GaborSystem& sys, double delta, const NormConfig& cfg) {
  SymbolNorms out;
  out.delta = delta;
  SymbolGrid G = dilated_symbol(sys, delta);
  SymbolGrid dG = dilated_symbol_derivative(sys, delta);
  out.g_inf1 = box_norm(G.samples(), G.grid(), M(kInf, 1), cfg);
  out.g_inf1_02 = box_norm(G.samples(), G.grid(), M(kInf, 1, 0, 2), cfg);
  out.dg_inf1 = box_norm(dG.samples(), dG.grid(), M(kInf, 1), cfg);
  return out;
}

GridSpec section_grid(double T) {
  double half = T + 4;
  int n = static_cast<int>(std::ceil(4 * half * half));
  n += n % 2;
  return GridSpec(1, n, 2 * half);
}

Eigen::MatrixXcd section_basis(const GridSpec& grid, double inner, double step, double cutoff) {
  if (grid.d != 1) throw DimensionError("finite section supports d = 1 only");
  Signal phi = gaussian(grid);
  std::vector<PhasePoint> zs;
  int K = static_cast<int>(std::floor(inner / step + 1e-9));
  for (int i = -K; i <= K; ++i)
    for (int j = -K; j <= K; ++j) zs.push_back(PhasePoint({i * step}, {j * step}));
  Eigen::MatrixXcd W = atoms(phi, zs, 1e-8);
  Eigen::MatrixXcd M = W * W.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  const auto& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  Eigen::Index first = 0;
  while (first < ev.size() && ev(first) <= cutoff * top) ++first;
  return es.eigenvectors().rightCols(ev.size() - first);
}

FrameBounds frame_bounds_finite_section(const GaborSystem& sys, const SectionConfig& cfg) {
  double inner = cfg.inner > 0 ? cfg.inner : cfg.T - 3;
  return frame_bounds_finite_section(sys, cfg, section_basis(sys.window.grid, inner, cfg.step, cfg.cutoff));
}

FrameBounds frame_bounds_finite_section(const GaborSystem& sys, const SectionConfig& cfg, const Eigen::MatrixXcd& U) {
  if (sys.window.grid.d != 1) throw DimensionError("finite section supports d = 1 only");
  if (U.rows() != static_cast<Eigen::Index>(sys.window.samples.size()))
    throw DimensionError("finite section: basis does not match the window grid");
  FrameBounds out;
  out.method = "finite_section";
  out.T = cfg.T;
  out.inner = cfg.inner > 0 ? cfg.inner : cfg.T - 3;
  out.rank = static_cast<int>(U.cols());
  auto pts = in_section(sys.scaled_points(), cfg.T);
  out.n_points = static_cast<int>(pts.size());
  if (pts.empty()) {
    if (cfg.gaps) out.spectrum = Spectrum::from_eigenvalues(std::vector<double>(std::max<Eigen::Index>(U.cols(), 1), 0.0));
    return out;
  }
  Eigen::MatrixXcd A = atoms(sys.window, pts, sys.tail_tol);
  {
    Eigen::MatrixXcd G = A.adjoint() * A;
    out.full_upper = G.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
  }
  Eigen::MatrixXcd B = U.adjoint() * A;
  Eigen::MatrixXcd C = B * B.adjoint();
  C = 0.5 * (C + C.adjoint()).eval();
  auto op = LinearOperatorHandle::from_dense(C, true);
  ExtremeEigs ee = extreme_eigs(op, cfg.eig);
  out.lower = std::max(0.0, ee.lower);
  out.upper = ee.upper;
  if (cfg.gaps) out.spectrum = Spectrum::from_eigenvalues(full_spectrum(op));
  if (cfg.norm_check) {
    NormEdges ne = edges_via_norms(op, 2 * std::max(ee.upper, 1e-300), 1e-10);
    out.norm_lower = ne.lower;
    out.norm_upper = ne.upper;
  }
  return out;
}

std::string FrameBounds::to_json() const {
  json j;
  j["lower"] = lower;
  j["upper"] = upper;
  j["method"] = method;
  if (method == "finite_section") {
    j["T"] = T;
    j["inner"] = inner;
    j["n_points"] = n_points;
    j["rank"] = rank;
    j["full_upper"] = full_upper;
  } else {
    j["p"] = p;
    j["q"] = q;
    j["rational_error"] = rational_error;
    j["evaluations"] = evaluations;
  }
  return j.dump();
}

namespace {

struct WalnutSetup {
  long p = 1, q = 1;
  double u = 0, beta = 0;
  double R = 0;
  int K = 0;
};

// Samples g(x + u j) for |x + u j| <= R, indexed from jmin.
struct WalnutSamples {
  long jmin = 0;
  cvec v;
  cplx at(long j) const {
    long i = j - jmin;
    return i >= 0 && i < static_cast<long>(v.size()) ? v[i] : cplx(0);
  }
};

WalnutSamples walnut_samples(const Interpolant& ip, const WalnutSetup& s, double x) {
  WalnutSamples out;
  out.jmin = static_cast<long>(std::floor((-s.R - x) / s.u));
  long jmax = static_cast<long>(std::ceil((s.R - x) / s.u));
  out.v.resize(jmax - out.jmin + 1);
  for (long j = out.jmin; j <= jmax; ++j) {
    double t = x + s.u * j;
    out.v[j - out.jmin] = std::abs(t) <= s.R ? ip(t) : cplx(0);
  }
  return out;
}

// G_k(x + u r) for r in [0, p), k in [-K, K]
std::vector<cvec> walnut_coeffs(const WalnutSamples& ws, const WalnutSetup& s) {
  std::vector<cvec> G(2 * s.K + 1, cvec(s.p, 0.0));
  const long jmax = ws.jmin + static_cast<long>(ws.v.size()) - 1;
  for (int k = -s.K; k <= s.K; ++k)
    for (long r = 0; r < s.p; ++r) {
      // terms g(x + u (r - p m)) conj g(x + u (r - p m - q k)) with both inside
      long mlo = static_cast<long>(std::floor(double(r - jmax) / s.p)) - 1;
      long mhi = static_cast<long>(std::ceil(double(r - ws.jmin) / s.p)) + 1;
      cplx acc = 0;
      for (long m = mlo; m <= mhi; ++m) {
        long j = r - s.p * m;
        cplx a = ws.at(j);
        if (a == cplx(0)) continue;
        acc += a * std::conj(ws.at(j - s.q * k));
      }
      G[k + s.K][r] = acc;
    }
  return G;
}

Eigen::MatrixXcd walnut_assemble(const std::vector<cvec>& G, const WalnutSetup& s, double theta) {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(s.p, s.p);
  for (int k = -s.K; k <= s.K; ++k)
    for (long r = 0; r < s.p; ++r) {
      long idx = r - k * s.q;
      long col = ((idx % s.p) + s.p) % s.p;
      long j = (idx - col) / s.p;
      M(r, col) += G[k + s.K][r] * std::polar(1.0 / s.beta, 2 * kPi * theta * j);
    }
  return M;
}

WalnutSetup walnut_setup(const Signal& g, double alpha, double beta, const ZakConfig& cfg, FluxRational& fr) {
  if (g.grid.d != 1) throw DimensionError("zak bounds support d = 1 only");
  if (!(alpha > 0) || !(beta > 0)) throw PreconditionError("zak bounds: lattice constants must be positive");
  fr = FluxRational::approximate(alpha * beta, cfg.qmax);
  if (fr.residual > cfg.rational_tol * alpha * beta)
    throw RationalizationError("zak bounds: alpha beta = " + std::to_string(alpha * beta) +
                               " has no approximation with q <= " + std::to_string(cfg.qmax) + " within tolerance");
  WalnutSetup s;
  s.p = fr.p;
  s.q = fr.q;
  s.beta = beta;
  s.u = 1 / (double(fr.q) * beta);
  if (cfg.support > 0) {
    s.R = cfg.support;
  } else {
    double peak = 0;
    for (auto& v : g.samples) peak = std::max(peak, std::abs(v));
    BoxGrid box = g.grid.box();
    for (std::size_t i = 0; i < g.samples.size(); ++i)
      if (std::abs(g.samples[i]) > 1e-17 * peak) s.R = std::max(s.R, std::abs(box.axis(0).node(static_cast<int>(i))));
    s.R += g.grid.step();
  }
  s.R = std::min(s.R, g.grid.len / 2);
  s.K = static_cast<int>(std::ceil(2 * s.R * beta)) + 1;
  return s;
}

double min_eig(const Eigen::MatrixXcd& M) {
  Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
  return H.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
}

double max_eig(const Eigen::MatrixXcd& M) {
  Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
  return H.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
}

}  // namespace

Eigen::MatrixXcd walnut_matrix(const Signal& g, double alpha, double beta, double x, double theta,
                               const ZakConfig& cfg) {
  FluxRational fr;
  WalnutSetup s = walnut_setup(g, alpha, beta, cfg, fr);
  Interpolant ip(g);
  return walnut_assemble(walnut_coeffs(walnut_samples(ip, s, x), s), s, theta);
}

FrameBounds frame_bounds_zak(const Signal& g, double alpha, double beta, const ZakConfig& cfg) {
  FluxRational fr;
  WalnutSetup s = walnut_setup(g, alpha, beta, cfg, fr);
  Interpolant ip(g);
  FrameBounds out;
  out.method = "zak";
  out.p = fr.p;
  out.q = fr.q;
  out.rational_error = fr.residual;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double lo_x = 0, lo_t = 0, hi_x = 0, hi_t = 0;
  for (int a = 0; a < cfg.nx; ++a) {
    double x = s.u * a / cfg.nx;
    auto G = walnut_coeffs(walnut_samples(ip, s, x), s);
    for (int b = 0; b < cfg.ntheta; ++b) {
      double th = double(b) / cfg.ntheta;
      Eigen::MatrixXcd H = walnut_assemble(G, s, th);
      H = 0.5 * (H + H.adjoint()).eval();
      auto ev = H.selfadjointView<Eigen::Lower>().eigenvalues();
      ++out.evaluations;
      if (ev.minCoeff() < lo) lo = ev.minCoeff(), lo_x = x, lo_t = th;
      if (ev.maxCoeff() > hi) hi = ev.maxCoeff(), hi_x = x, hi_t = th;
    }
  }
  if (cfg.refine) {
    // pattern search on the periodic fundamental domain
    auto polish = [&](double& best, double x0, double t0, int sign) {
      auto f = [&](double x, double t) {
        x = std::fmod(std::fmod(x, s.u) + s.u, s.u);
        t = t - std::floor(t);
        ++out.evaluations;
        auto M = walnut_assemble(walnut_coeffs(walnut_samples(ip, s, x), s), s, t);
        return sign > 0 ? -max_eig(M) : min_eig(M);
      };
      double cur = sign > 0 ? -best : best;
      double hx = 0.5 * s.u / cfg.nx, ht = 0.5 / cfg.ntheta;
      for (int it = 0; it < 400 && hx > 1e-9 * s.u; ++it) {
        bool moved = false;
        const double cand[4][2] = {{hx, 0}, {-hx, 0}, {0, ht}, {0, -ht}};
        for (auto& c : cand) {
          double v = f(x0 + c[0], t0 + c[1]);
          if (v < cur - 1e-15) {
            cur = v, x0 += c[0], t0 += c[1], moved = true;
            break;
          }
        }
        if (!moved) hx *= 0.5, ht *= 0.5;
      }
      best = sign > 0 ? -cur : cur;
    };
    polish(lo, lo_x, lo_t, -1);
    polish(hi, hi_x, hi_t, +1);
  }
  out.lower = std::max(0.0, lo);
  out.upper = hi;
  return out;
}

FourierSymbol gaussian_lattice_symbol(int K) {
  FourierSymbol s;
  s.name = "gaussian_lattice";
  s.K = K;
  s.coeff = [K](int k1, int k2, double delta) -> cplx {
    if (std::max(std::abs(k1), std::abs(k2)) > K) return 0.0;
    return (1 + delta) * std::exp(-kPi * (1 + delta) * (k1 * k1 + k2 * k2) / 2);
  };
  s.dcoeff = [K](int k1, int k2, double delta) -> cplx {
    if (std::max(std::abs(k1), std::abs(k2)) > K) return 0.0;
    const double r = kPi * (k1 * k1 + k2 * k2) / 2;
    return std::exp(-r * (1 + delta)) * (1 - (1 + delta) * r);
  };
  return s;
}

PowerFit power_fit(const std::vector<double>& x, const std::vector<double>& y) {
  PowerFit out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  out.points = n;
  if (n < 2) return out;
  double den = n * sxx - sx * sx;
  if (den == 0) return out;
  out.slope = (n * sxy - sx * sy) / den;
  out.c = std::exp((sy - out.slope * sx) / n);
  return out;
}

SweepResult sweep_alpha(const Signal& g, const PointSet& pts, const std::vector<double>& alphas,
                        const SweepConfig& cfg) {
  if (alphas.empty()) throw PreconditionError("sweep_alpha: no alpha values");
  if (!(cfg.alpha0 > 0 && cfg.alpha0 < 1)) throw PreconditionError("sweep_alpha: alpha0 must lie in (0, 1)");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > cfg.alpha0 && alphas[i] < 1 / cfg.alpha0))
      throw PreconditionError("sweep_alpha: alpha outside (alpha0, 1/alpha0)");
    if (i && alphas[i] < alphas[i - 1]) throw PreconditionError("sweep_alpha: alphas must be nondecreasing");
  }
  SweepResult out;
  out.alphas = alphas;
  out.records.resize(alphas.size());
  out.rel = pts.rel;

  SectionConfig sec = cfg.section;
  sec.gaps = true;
  const double inner = sec.inner > 0 ? sec.inner : sec.T - 3;
  Eigen::MatrixXcd U = section_basis(g.grid, inner, sec.step, sec.cutoff);

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < alphas.size();) {
      SweepRecord& r = out.records[i];
      r.alpha = alphas[i];
      r.delta = 1 / (alphas[i] * alphas[i]) - 1;
      try {
        GaborSystem sys(g, pts, alphas[i]);
        r.bounds = frame_bounds_finite_section(sys, sec, U);
        const auto& ev = r.bounds.spectrum.eigenvalues();
        double eta = cfg.gap_eta;
        if (eta < 0 && ev.size() > 1) {
          std::vector<double> sp;
          for (std::size_t k = 1; k < ev.size(); ++k) sp.push_back(ev[k] - ev[k - 1]);
          std::nth_element(sp.begin(), sp.begin() + sp.size() / 2, sp.end());
          eta = std::max(1e-3 * (ev.back() - ev.front()), 4 * sp[sp.size() / 2]);
        }
        r.gaps = detect_gaps(r.bounds.spectrum, eta);
      } catch (const Error& e) {
        r.failure = e.what();
      }
    }
  };
  int nt = std::max(1, std::min<int>(cfg.threads, static_cast<int>(alphas.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (auto& r : out.records)
    if (!r.failure.empty()) out.failures.push_back("alpha " + std::to_string(r.alpha) + ": " + r.failure);

  // adjacent successful records
  int prev = -1;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    if (!out.records[i].failure.empty()) continue;
    if (prev >= 0) {
      const auto& a = out.records[prev];
      const auto& b = out.records[i];
      double da = std::abs(b.alpha - a.alpha);
      double ql = std::abs(b.bounds.lower - a.bounds.lower), qu = std::abs(b.bounds.upper - a.bounds.upper);
      ql = da > 0 ? ql / da : (ql == 0 ? 0 : std::numeric_limits<double>::infinity());
      qu = da > 0 ? qu / da : (qu == 0 ? 0 : std::numeric_limits<double>::infinity());
      out.lower_quotients.push_back(ql);
      out.upper_quotients.push_back(qu);
      out.max_quotient = std::max({out.max_quotient, ql, qu});
    }
    prev = static_cast<int>(i);
  }

  out.window_m1_2 = mod_norm(g, M(1, 1, 2, 2)).value;
  const int d = g.grid.d;
  out.rhs = out.rel * out.window_m1_2 * out.window_m1_2 * std::pow(cfg.alpha0, -(4.0 * d + 2));
  out.c_hat = out.rhs > 0 ? out.max_quotient / out.rhs : 0;

  std::vector<double> params, fx, fy;
  std::vector<Spectrum> specs;
  bool increasing = true;
  for (auto& r : out.records) {
    if (!r.failure.empty()) continue;
    if (!params.empty() && r.alpha <= params.back()) increasing = false;
    params.push_back(r.alpha);
    specs.push_back(r.bounds.spectrum);
    if (r.alpha >= cfg.fit_from && r.alpha < 1) fx.push_back(1 - r.alpha), fy.push_back(r.bounds.lower);
  }
  if (increasing && params.size() >= 2) out.track = track_edges(params, specs, cfg.gap_eta);
  PowerFit pf = power_fit(fx, fy);
  out.fit_slope = pf.slope;
  out.fit_const = pf.c;
  out.fit_points = pf.points;

  std::ostringstream key;
  key.precision(17);
  key << "alpha-sweep;T=" << sec.T << ";inner=" << inner << ";step=" << sec.step << ";cutoff=" << sec.cutoff
      << ";alpha0=" << cfg.alpha0 << ";fit_from=" << cfg.fit_from << ";eta=" << cfg.gap_eta << ";n=" << g.grid.n
      << ";len=" << g.grid.len << ";label=" << g.label << ";alphas=";
  for (double a : alphas) key << a << ",";
  key << ";pts=";
  for (auto& z : pts.points) key << describe(z);
  std::ostringstream hx;
  hx << std::hex << fnv1a(key.str());
  out.config_hash = hx.str();
  return out;
}

std::string SweepResult::to_json() const {
  json j;
  j["alphas"] = alphas;
  json recs = json::array();
  for (auto& r : records) {
    json x;
    x["alpha"] = r.alpha;
    x["delta"] = r.delta;
    x["lower"] = r.bounds.lower;
    x["upper"] = r.bounds.upper;
    x["n_points"] = r.bounds.n_points;
    x["rank"] = r.bounds.rank;
    json gl = json::array();
    for (auto& gp : r.gaps.gaps) gl.push_back({gp.lo, gp.hi});
    x["gaps"] = gl;
    x["gap_eta"] = r.gaps.eta;
    if (!r.failure.empty()) x["failure"] = r.failure;
    recs.push_back(x);
  }
  j["records"] = recs;
  j["lower_quotients"] = lower_quotients;
  j["upper_quotients"] = upper_quotients;
  j["max_quotient"] = max_quotient;
  j["rel"] = rel;
  j["window_m1_2"] = window_m1_2;
  j["rhs"] = rhs;
  j["c_hat"] = c_hat;
  j["fit"] = {{"slope", fit_slope}, {"c", fit_const}, {"points", fit_points}};
  j["failures"] = failures;
  j["config_hash"] = config_hash;
  j["library_version"] = EDGEWISE_VERSION;
  return j.dump(1);
}

}  // namespace edgewise
