#pragma once

#include <string>
#include <vector>

#include "edgewise/harper.hpp"
#include "edgewise/modnorm.hpp"
#include "edgewise/operator.hpp"
#include "edgewise/spectra.hpp"
#include "edgewise/tfcore.hpp"
#include "edgewise/weyl.hpp"

namespace edgewise {

struct GaborSystem {
  Signal window;
  PointSet pts;
  double alpha = 1;
  bool allow_non_unit = false;  // skip the ||g||_2 = 1 check
  double tail_tol = 1e-8;       // boundary and spectral tail allowed per atom

  GaborSystem() = default;
  GaborSystem(Signal g, PointSet p, double alpha = 1, bool allow_non_unit = false);

  // 1/alpha = sqrt(1 + delta)
  double delta() const { return 1 / (alpha * alpha) - 1; }
  std::vector<PhasePoint> scaled_points() const;
};

// Throws BoundaryWrapError listing the points whose atoms leak out of the box.
void check_atoms(const GaborSystem& sys);

// Columns rho(alpha lambda) g as flat samples times sqrt(h^d), so that S = A A^*.
Eigen::MatrixXcd atom_matrix(const GaborSystem& sys);

// S f = sum <f, rho(alpha lambda) g> rho(alpha lambda) g
Signal frame_apply(const GaborSystem& sys, const Signal& f);
LinearOperatorHandle frame_operator(const GaborSystem& sys);

// sum_lambda T_{alpha lambda} W(g) on weyl_grid(window grid)
SymbolGrid frame_symbol(const GaborSystem& sys);
// G_delta = sum_lambda T_lambda D_{1/sqrt(1+delta)} W(g) and its delta derivative
SymbolGrid dilated_symbol(const GaborSystem& sys, double delta);
SymbolGrid dilated_symbol_derivative(const GaborSystem& sys, double delta);

struct SymbolNorms {
  double delta = 0;
  NormEstimate g_inf1;     // |G_delta|_{M^{inf,1}}
  NormEstimate g_inf1_02;  // |G_delta|_{M^{inf,1}_{0,2}}
  NormEstimate dg_inf1;    // |d/d delta G_delta|_{M^{inf,1}}
};

SymbolNorms symbol_norms(const GaborSystem& sys, double delta, const NormConfig& cfg = {});

struct SectionConfig {
  double T = 12;         // Lambda cut to [-T, T]^2
  double inner = -1;     // compression box half-width, <= 0 means T - 3
  double step = 0.5;     // spacing of the Gaussian atoms spanning the compression space
  double cutoff = 1e-12; // relative eigenvalue cutoff of that span
  bool gaps = false;     // keep the whole compressed spectrum
  bool norm_check = false;  // shifted-norm cross-check, slow on continuous spectra
  EigConfig eig;
};

// Grid (1, 4 (T+4)^2, 2 (T+4)): box [-T-4, T+4] with the same half-width in frequency.
GridSpec section_grid(double T);

struct FrameBounds {
  double lower = 0, upper = 0;
  std::string method;  // finite_section or zak
  // finite section
  double T = 0, inner = 0;
  int n_points = 0, rank = 0;
  double full_lower = 0, full_upper = 0;  // uncompressed extremes
  double norm_lower = 0, norm_upper = 0;  // shifted-norm route
  Spectrum spectrum;                      // compressed spectrum when requested
  // zak
  long p = 0, q = 0;
  double rational_error = 0;
  int evaluations = 0;

  std::string to_json() const;
};

FrameBounds frame_bounds_finite_section(const GaborSystem& sys, const SectionConfig& cfg = {});

// Orthonormal basis of the compression space, reusable across alpha.
Eigen::MatrixXcd section_basis(const GridSpec& grid, double inner, double step, double cutoff);
FrameBounds frame_bounds_finite_section(const GaborSystem& sys, const SectionConfig& cfg, const Eigen::MatrixXcd& basis);

struct ZakConfig {
  long qmax = 200;
  double rational_tol = 1e-4;  // relative error allowed in alpha beta
  int nx = 12, ntheta = 12;
  bool refine = true;
  double support = -1;         // window radius, <= 0 means measured from the samples
};

// Frame bounds of g on alpha Z x beta Z from p x p Walnut matrices, alpha beta ~ p/q. d = 1.
FrameBounds frame_bounds_zak(const Signal& g, double alpha, double beta, const ZakConfig& cfg = {});
// Walnut matrix at (x, theta), x in [0, 1/(q beta)), theta in [0, 1).
Eigen::MatrixXcd walnut_matrix(const Signal& g, double alpha, double beta, double x, double theta,
                               const ZakConfig& cfg = {});

struct SweepConfig {
  SectionConfig section;
  double alpha0 = 0.75;
  double fit_from = 0.9;  // near-critical fit uses alpha >= fit_from
  int threads = 1;
  double gap_eta = -1;
};

struct SweepRecord {
  double alpha = 0, delta = 0;
  FrameBounds bounds;
  GapList gaps;
  std::string failure;
};

struct SweepResult {
  std::vector<double> alphas;
  std::vector<SweepRecord> records;
  std::vector<double> lower_quotients, upper_quotients;  // adjacent pairs
  double max_quotient = 0;
  int rel = 0;
  double window_m1_2 = 0;  // |g|_{M^1_{2,2}}
  double rhs = 0;          // rel |g|^2 alpha0^{-(4d+2)}
  double c_hat = 0;        // max_quotient / rhs
  EdgeTrack track;
  double fit_slope = 0, fit_const = 0;
  int fit_points = 0;
  std::vector<std::string> failures;
  std::string config_hash;

  std::string to_json() const;
};

SweepResult sweep_alpha(const Signal& g, const PointSet& pts, const std::vector<double>& alphas,
                        const SweepConfig& cfg = {});

// Janssen form of the Gaussian frame operator on alpha Z^2, 1/alpha^2 = 1 + delta:
// (1+delta) sum_k e^{-pi (1+delta) |k|^2 / 2} rho(sqrt(1+delta) k), for the Bloch route.
FourierSymbol gaussian_lattice_symbol(int K = 4);

// Least-squares fit log y = log c + slope log x.
struct PowerFit {
  double slope = 0, c = 0;
  int points = 0;
};
PowerFit power_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace edgewise
