#include "edgewise/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "edgewise/errors.hpp"

namespace edgewise {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_hermitian(const LinearOperatorHandle& op) {
  if (op.hermitian) return;
  if (hermiticity_defect(op, 4, 3) > 1e-8) throw PreconditionError("operator is not hermitian");
}

double dot_re(const cvec& a, const cvec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
  return s;
}

double l2(const cvec& a) {
  double s = 0;
  for (auto& v : a) s += std::norm(v);
  return std::sqrt(s);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  double hi = v[m];
  if (v.size() % 2) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + m);
  return 0.5 * (lo + hi);
}

}  // namespace

Spectrum Spectrum::from_eigenvalues(std::vector<double> ev, double eta) {
  if (ev.empty()) throw PreconditionError("spectrum: no eigenvalues");
  std::sort(ev.begin(), ev.end());
  Spectrum s;
  s.eta_ = eta >= 0 ? eta : (ev.back() - ev.front()) * 1e-3;
  s.ev_ = std::move(ev);
  return s;
}

Spectrum Spectrum::from_bands(std::vector<Band> bands, double eta) {
  if (bands.empty()) throw PreconditionError("spectrum: no bands");
  for (auto& b : bands)
    if (b.lo > b.hi) std::swap(b.lo, b.hi);
  std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
  double lo = bands.front().lo, hi = lo;
  for (auto& b : bands) hi = std::max(hi, b.hi);
  Spectrum s;
  s.eta_ = eta >= 0 ? eta : (hi - lo) * 1e-3;
  for (auto& b : bands) {
    if (!s.bands_.empty() && b.lo - s.bands_.back().hi <= s.eta_)
      s.bands_.back().hi = std::max(s.bands_.back().hi, b.hi);
    else
      s.bands_.push_back(b);
  }
  return s;
}

double Spectrum::lower() const { return is_bands() ? bands_.front().lo : ev_.front(); }
double Spectrum::upper() const { return is_bands() ? bands_.back().hi : ev_.back(); }

double Spectrum::max_abs_quadratic(double b, double c) const {
  auto p = [&](double x) { return std::abs(x * x + b * x + c); };
  double m = 0;
  if (is_bands()) {
    for (auto& bd : bands_) {
      m = std::max({m, p(bd.lo), p(bd.hi)});
      double v = -0.5 * b;
      if (v > bd.lo && v < bd.hi) m = std::max(m, p(v));
    }
  } else {
    for (double x : ev_) m = std::max(m, p(x));
  }
  return m;
}

bool Spectrum::meets(double lo, double hi) const {
  if (is_bands()) {
    for (auto& b : bands_)
      if (b.hi > lo && b.lo < hi) return true;
    return false;
  }
  auto it = std::upper_bound(ev_.begin(), ev_.end(), lo);
  return it != ev_.end() && *it < hi;
}

std::vector<double> full_spectrum(const LinearOperatorHandle& op) {
  require_hermitian(op);
  Eigen::MatrixXcd m = op.to_dense();
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

ExtremeEigs extreme_eigs(const LinearOperatorHandle& op, const EigConfig& cfg) {
  require_hermitian(op);
  const int n = op.dim;
  if (n <= 0) throw DimensionError("extreme_eigs: empty operator");
  ExtremeEigs out;
  if (n <= cfg.dense_limit) {
    auto ev = full_spectrum(op);
    out.lower = ev.front();
    out.upper = ev.back();
    out.dense = true;
    return out;
  }

  // Lanczos with full reorthogonalization
  std::vector<cvec> Q;
  std::vector<double> alpha, beta;
  cvec q = random_vector(n, cfg.seed);
  double nq = l2(q);
  for (auto& v : q) v /= nq;
  Q.push_back(q);
  cvec w(n);
  const int cap = std::min(n, cfg.max_iter);
  for (int k = 0; k < cap; ++k) {
    op.apply(Q[k].data(), w.data());
    double a = dot_re(Q[k], w);
    alpha.push_back(a);
    for (int i = 0; i < n; ++i) w[i] -= a * Q[k][i];
    if (k > 0)
      for (int i = 0; i < n; ++i) w[i] -= beta[k - 1] * Q[k - 1][i];
    for (int pass = 0; pass < 2; ++pass)
      for (auto& qj : Q) {
        cplx c = 0;
        for (int i = 0; i < n; ++i) c += std::conj(qj[i]) * w[i];
        for (int i = 0; i < n; ++i) w[i] -= c * qj[i];
      }
    double b = l2(w);
    const int m = k + 1;
    bool check = (m % 8 == 0) || m == cap || b < 1e-14;
    if (check) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      double lo = es.eigenvalues()(0), hi = es.eigenvalues()(m - 1);
      double r_lo = std::abs(b * es.eigenvectors()(m - 1, 0));
      double r_hi = std::abs(b * es.eigenvectors()(m - 1, m - 1));
      double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
      out.lower = lo;
      out.upper = hi;
      out.residual = std::max(r_lo, r_hi);
      out.iterations = m;
      if (out.residual <= cfg.tol * scale || b < 1e-14) return out;
    }
    if (m == cap) break;
    beta.push_back(b);
    for (auto& v : w) v /= b;
    Q.push_back(w);
  }
  throw ConvergenceError("extreme_eigs: Lanczos iteration cap reached");
}

double power_norm(const LinearOperatorHandle& op, double tol, int max_iter, unsigned long long seed, double* dominant,
                  int* iters) {
  const int n = op.dim;
  cvec v = random_vector(n, seed), w(n);
  double nv = l2(v);
  for (auto& x : v) x /= nv;
  for (int k = 1; k <= max_iter; ++k) {
    op.apply(v.data(), w.data());
    double mu = dot_re(v, w);
    double r = 0;
    for (int i = 0; i < n; ++i) r += std::norm(w[i] - mu * v[i]);
    r = std::sqrt(r);
    double nw = l2(w);
    if (r <= tol * std::abs(mu) || nw == 0) {
      if (dominant) *dominant = mu;
      if (iters) *iters = k;
      return std::abs(mu);
    }
    for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  throw ConvergenceError("power iteration did not converge");
}

NormEdges edges_via_norms(const LinearOperatorHandle& op, double lam, double tol) {
  require_hermitian(op);
  if (!(lam > 0)) throw PreconditionError("edges_via_norms: lambda must exceed the operator norm");
  NormEdges out;
  double dom_p = 0, dom_m = 0;
  int ip = 0, im = 0;
  out.norm_plus = power_norm(shifted(op, lam), tol, 200000, 11, &dom_p, &ip);
  out.norm_minus = power_norm(shifted(op, -lam), tol, 200000, 13, &dom_m, &im);
  // A + lam I must be positive and A - lam I negative on the dominant direction
  if (dom_p < 0 || dom_m > 0) throw PreconditionError("edges_via_norms: lambda is below the operator norm");
  out.upper = out.norm_plus - lam;
  out.lower = lam - out.norm_minus;
  out.iterations = ip + im;
  return out;
}

GapList detect_gaps(const Spectrum& s, double eta) {
  GapList out;
  out.eta = eta >= 0 ? eta : (s.upper() - s.lower()) * 1e-3;
  if (s.is_bands()) {
    const auto& b = s.bands();
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      if (b[i + 1].lo - b[i].hi > out.eta) out.gaps.push_back({b[i].hi, b[i + 1].lo});
  } else {
    const auto& e = s.eigenvalues();
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
      if (e[i + 1] - e[i] > out.eta) out.gaps.push_back({e[i], e[i + 1]});
  }
  return out;
}

GapMatching match_gaps(const GapList& a, const GapList& b) {
  GapMatching out;
  std::vector<int> order(a.gaps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  // longest gaps choose first
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a.gaps[i].length() > a.gaps[j].length(); });
  std::vector<bool> used(b.gaps.size(), false);
  auto inside = [](double x, const Gap& g) { return x > g.lo && x < g.hi; };
  for (int i : order) {
    const Gap& ga = a.gaps[i];
    int best = -1, count = 0;
    double best_overlap = -1;
    for (std::size_t j = 0; j < b.gaps.size(); ++j) {
      if (used[j]) continue;
      const Gap& gb = b.gaps[j];
      if (!inside(ga.mid(), gb) && !inside(gb.mid(), ga)) continue;
      ++count;
      double ov = std::min(ga.hi, gb.hi) - std::max(ga.lo, gb.lo);
      if (ov > best_overlap) {
        best_overlap = ov;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) {
      out.orphans_a.push_back(i);
      continue;
    }
    used[best] = true;
    GapPair p;
    p.a = i;
    p.b = best;
    p.ambiguous = count > 1;
    p.d_lo = b.gaps[best].lo - ga.lo;
    p.d_hi = b.gaps[best].hi - ga.hi;
    out.pairs.push_back(p);
  }
  for (std::size_t j = 0; j < used.size(); ++j)
    if (!used[j]) out.orphans_b.push_back(static_cast<int>(j));
  std::sort(out.pairs.begin(), out.pairs.end(), [](const GapPair& x, const GapPair& y) { return x.a < y.a; });
  std::sort(out.orphans_a.begin(), out.orphans_a.end());
  return out;
}

P2Probe p2_probe(const std::function<Spectrum(double)>& family, const std::vector<double>& deltas, double norm0) {
  if (deltas.size() < 2) throw PreconditionError("p2_probe: need at least two parameter values");
  P2Probe out;
  for (int i = 0; i < 5; ++i) {
    out.betas.push_back(-2 * norm0 + i * norm0);
    out.gammas.push_back(-5 * norm0 * norm0 + i * 2.5 * norm0 * norm0);
  }
  std::vector<Spectrum> specs;
  specs.reserve(deltas.size());
  for (double d : deltas) specs.push_back(family(d));
  out.quotients.assign(25, 0.0);
  for (int ib = 0; ib < 5; ++ib)
    for (int ig = 0; ig < 5; ++ig) {
      double q = 0, prev = specs[0].max_abs_quadratic(out.betas[ib], out.gammas[ig]);
      for (std::size_t k = 1; k < specs.size(); ++k) {
        double cur = specs[k].max_abs_quadratic(out.betas[ib], out.gammas[ig]);
        double dd = std::abs(deltas[k] - deltas[k - 1]);
        if (dd > 0) q = std::max(q, std::abs(cur - prev) / dd);
        prev = cur;
      }
      out.quotients[ib * 5 + ig] = q;
      out.c_p = std::max(out.c_p, q);
    }
  return out;
}

P2Probe p2_probe(const std::function<LinearOperatorHandle(double)>& family, const std::vector<double>& deltas,
                 double norm0) {
  return p2_probe(
      std::function<Spectrum(double)>(
          [&family](double d) { return Spectrum::from_eigenvalues(full_spectrum(family(d))); }),
      deltas, norm0);
}

EdgeTrack track_edges(const std::vector<double>& params, const std::vector<Spectrum>& spectra, double eta) {
  if (params.size() != spectra.size() || params.empty())
    throw PreconditionError("track_edges: one spectrum per parameter is required");
  const std::size_t m = params.size();
  EdgeTrack t;
  t.params = params;
  t.names = {"lower", "upper"};
  t.series.assign(2, std::vector<double>(m));
  t.ambiguous.assign(2, std::vector<bool>(m, false));
  std::vector<GapList> gl;
  for (std::size_t i = 0; i < m; ++i) {
    t.series[0][i] = spectra[i].lower();
    t.series[1][i] = spectra[i].upper();
    gl.push_back(detect_gaps(spectra[i], eta));
  }
  for (std::size_t g = 0; g < gl[0].gaps.size(); ++g) {
    std::vector<double> lo(m, kNaN), hi(m, kNaN);
    std::vector<bool> amb(m, false);
    int cur = static_cast<int>(g);
    lo[0] = gl[0].gaps[g].lo;
    hi[0] = gl[0].gaps[g].hi;
    for (std::size_t i = 1; i < m && cur >= 0; ++i) {
      GapMatching mt = match_gaps(gl[i - 1], gl[i]);
      int next = -1;
      for (auto& p : mt.pairs)
        if (p.a == cur) {
          next = p.b;
          amb[i] = p.ambiguous;
        }
      cur = next;
      if (cur >= 0) {
        lo[i] = gl[i].gaps[cur].lo;
        hi[i] = gl[i].gaps[cur].hi;
      }
    }
    t.names.push_back("gap" + std::to_string(g) + ".lo");
    t.names.push_back("gap" + std::to_string(g) + ".hi");
    t.series.push_back(lo);
    t.series.push_back(hi);
    t.ambiguous.push_back(amb);
    t.ambiguous.push_back(amb);
  }
  return t;
}

LipschitzReport lipschitz_fit(const EdgeTrack& track) {
  const auto& p = track.params;
  if (p.size() < 3) throw PreconditionError("lipschitz_fit: need at least three parameter values");
  for (std::size_t i = 1; i < p.size(); ++i)
    if (!(p[i] > p[i - 1])) throw PreconditionError("lipschitz_fit: parameters must increase");
  LipschitzReport r;
  std::vector<double> all;
  auto quotients = [&](const std::vector<double>& s, std::size_t stride, std::vector<double>* sink) {
    double mx = 0;
    for (std::size_t i = 0; i + stride < p.size(); i += stride) {
      double a = s[i], b = s[i + stride];
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      double q = std::abs(b - a) / (p[i + stride] - p[i]);
      mx = std::max(mx, q);
      if (sink) sink->push_back(q);
    }
    return mx;
  };
  for (const auto& s : track.series) {
    double mx = quotients(s, 1, &all);
    r.per_series.push_back(mx);
    r.max_quotient = std::max(r.max_quotient, mx);
    r.coarse_max = std::max(r.coarse_max, quotients(s, 2, nullptr));
  }
  r.median_quotient = median(all);
  r.stable = std::abs(r.max_quotient - r.coarse_max) <= 0.25 * r.max_quotient;
  return r;
}

}  // namespace edgewise
