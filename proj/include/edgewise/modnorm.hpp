#pragma once

#include <limits>
#include <string>
#include <vector>

#include "edgewise/tfcore.hpp"

namespace edgewise {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Flavor { modulation, amalgam, fourier_l1 };

struct NormSpec {
  double p = 1, q = 1;  // each of 1, 2, inf
  double s = 0, t = 0;
  Flavor flavor = Flavor::modulation;
};

NormSpec M(double p, double q, double s = 0, double t = 0);
NormSpec W(double p, double q, double s = 0, double t = 0);

struct NormEstimate {
  double value = 0;
  double tail_bound = 0;    // weighted integrand on the grid boundary, relative to its peak
  double coarse_value = 0;  // same sum on the every-other-node subgrid
  bool converged = false;   // |value - coarse| < 1% of value
  bool sup_lower_bound = false;
  BoxGrid resolution;
  NormSpec spec;

  std::string to_json() const;
};

struct NormConfig {
  double step = 0.25;       // target phase-grid step on both position and frequency axes
  double tail_tol = 1e-6;   // TailError above this; <= 0 disables the check
};

// Gaussian window 2^{D/4} exp(-pi |y|^2) sampled on a box grid of rank D.
cvec gaussian_on(const BoxGrid& g);

// Phase grid used for V_phi of samples on g at roughly the given step.
BoxGrid norm_phase_grid(const BoxGrid& g, double step);

// Mixed norm of samples on a box grid of rank D (functions on R^D).
NormEstimate box_norm(const cvec& f, const BoxGrid& g, const NormSpec& spec, const NormConfig& cfg = {});

NormEstimate mod_norm(const Signal& f, const NormSpec& spec, const NormConfig& cfg = {});
NormEstimate mod_norm(const PhaseFunction& F, const NormSpec& spec, const NormConfig& cfg = {});
NormEstimate amalgam_norm(const Signal& f, const NormSpec& spec, const NormConfig& cfg = {});
NormEstimate amalgam_norm(const PhaseFunction& F, const NormSpec& spec, const NormConfig& cfg = {});

// ||(1+|zeta|)^s fhat||_{L^1} by quadrature on the dual grid.
NormEstimate fourier_l1(const cvec& f, const BoxGrid& g, double s = 0);

// Plain L^p norms of samples (p = 1, 2, inf).
double lp_norm(const cvec& f, const BoxGrid& g, double p);

struct PointSet {
  std::vector<PhasePoint> points;
  int rel = 0;

  PointSet() = default;
  explicit PointSet(std::vector<PhasePoint> pts);
  int d() const { return points.empty() ? 0 : points.front().d(); }
  std::size_t size() const { return points.size(); }
  PointSet scaled(double alpha) const;

  static PointSet lattice(int d, double spacing, double T);
  // Unit lattice with uniform jitter in [-jitter, jitter] per coordinate.
  static PointSet jittered(int d, double jitter, double T, unsigned long long seed);
  static PointSet load_csv(const std::string& path);
};

// sup over translates of the half-open unit cube of the point count.
int relative_separation(const std::vector<PhasePoint>& pts);

struct MeasureNorm {
  NormEstimate norm;
  int rel = 0;
};

// ||sum_lambda delta_lambda||_{M^inf} with a nonnegative compactly supported
// bump window; for such windows the sup over frequency sits at 0.
MeasureNorm measure_norm(const PointSet& pts, double step = 0.05);

}  // namespace edgewise
