#pragma once

#include <functional>
#include <string>
#include <vector>

#include "edgewise/operator.hpp"

namespace edgewise {

struct Band {
  double lo = 0, hi = 0;
};

// Either a sorted eigenvalue list (finite section) or disjoint sorted bands (Bloch).
class Spectrum {
 public:
  static Spectrum from_eigenvalues(std::vector<double> ev, double eta = -1);
  // bands closer than eta are merged
  static Spectrum from_bands(std::vector<Band> bands, double eta = -1);

  bool is_bands() const { return !bands_.empty(); }
  const std::vector<double>& eigenvalues() const { return ev_; }
  const std::vector<Band>& bands() const { return bands_; }
  double lower() const;
  double upper() const;
  double eta() const { return eta_; }
  // max |p(x)| over the spectrum for p(x) = x^2 + b x + c
  double max_abs_quadratic(double b, double c) const;
  // true if some eigenvalue or band point lies in the open interval (lo, hi)
  bool meets(double lo, double hi) const;

 private:
  std::vector<double> ev_;
  std::vector<Band> bands_;
  double eta_ = 0;
};

struct Gap {
  double lo = 0, hi = 0;
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

struct GapList {
  std::vector<Gap> gaps;
  double eta = 0;
};

struct EigConfig {
  double tol = 1e-8;  // residual relative to |A|
  int max_iter = 400;
  int dense_limit = 2048;
  unsigned long long seed = 7;
};

struct ExtremeEigs {
  double lower = 0, upper = 0;
  double residual = 0;  // worst of the two Ritz residuals, 0 on the dense path
  int iterations = 0;
  bool dense = false;
};

ExtremeEigs extreme_eigs(const LinearOperatorHandle& op, const EigConfig& cfg = {});
// all eigenvalues of a hermitian operator, dense
std::vector<double> full_spectrum(const LinearOperatorHandle& op);

struct NormEdges {
  double lower = 0, upper = 0;
  double norm_plus = 0, norm_minus = 0;  // |A + lam I|, |A - lam I|
  int iterations = 0;
};

// largest |eigenvalue| of a hermitian operator by power iteration; sign of the
// dominant Rayleigh quotient returned in *dominant if given
double power_norm(const LinearOperatorHandle& op, double tol = 1e-11, int max_iter = 200000,
                  unsigned long long seed = 11, double* dominant = nullptr, int* iters = nullptr);
NormEdges edges_via_norms(const LinearOperatorHandle& op, double lam, double tol = 1e-11);

GapList detect_gaps(const Spectrum& s, double eta = -1);

struct GapPair {
  int a = -1, b = -1;
  bool ambiguous = false;
  double d_lo = 0, d_hi = 0;  // b - a for each edge
};

struct GapMatching {
  std::vector<GapPair> pairs;
  std::vector<int> orphans_a, orphans_b;
};

GapMatching match_gaps(const GapList& a, const GapList& b);

struct P2Probe {
  double c_p = 0;
  std::vector<double> betas, gammas;
  std::vector<double> quotients;  // row-major over (beta, gamma)
  double quotient(int ib, int ig) const { return quotients[ib * gammas.size() + ig]; }
};

P2Probe p2_probe(const std::function<Spectrum(double)>& family, const std::vector<double>& deltas, double norm0);
P2Probe p2_probe(const std::function<LinearOperatorHandle(double)>& family, const std::vector<double>& deltas,
                 double norm0);

// Edge values per series along a parameter; NaN where a gap was not matched.
struct EdgeTrack {
  std::vector<double> params;
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;
  std::vector<std::vector<bool>> ambiguous;
};

// Follows sigma_-, sigma_+ and every gap of the first spectrum along the chain.
EdgeTrack track_edges(const std::vector<double>& params, const std::vector<Spectrum>& spectra, double eta = -1);

struct LipschitzReport {
  double max_quotient = 0;
  double median_quotient = 0;
  double coarse_max = 0;  // on every other parameter
  bool stable = false;    // max and coarse max within 25%
  std::vector<double> per_series;
};

LipschitzReport lipschitz_fit(const EdgeTrack& track);

}  // namespace edgewise
