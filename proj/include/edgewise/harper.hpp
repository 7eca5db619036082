#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edgewise/operator.hpp"
#include "edgewise/spectra.hpp"

namespace edgewise {

struct FourierTerm {
  int k1 = 0, k2 = 0;
  cplx a = 0;
};

// sigma_delta(z) = sum_k a_k(delta) e^{2 pi i sqrt(1+delta) [k, z]} with |k|_inf <= K.
// The operator is sum_k a_k(delta) rho(sqrt(1+delta) k).
struct FourierSymbol {
  std::string name;
  int K = 1;
  std::function<cplx(int, int, double)> coeff;
  std::function<cplx(int, int, double)> dcoeff;  // d/d delta, may be empty

  std::vector<FourierTerm> terms(double delta) const;
  // a_{-k} = conj(a_k) and nothing outside |k|_inf <= K, checked at delta
  void validate(double delta) const;
  double l1(double delta) const;

  // a_{+-e1} = a_{+-e2} = 1: 2 cos(2 pi x) + 2 cos(2 pi w)
  static FourierSymbol harper();
  // a_{+-e1} = 1, a_{+-e2} = lambda
  static FourierSymbol almost_mathieu(double lambda);
  // delta-independent table
  static FourierSymbol table(std::vector<FourierTerm> terms, std::string name = "table");
  // {"builtin": "harper"} or {"builtin": "almost_mathieu", "lambda": l} or {"terms": [{"k": [k1, k2], "re": .., "im": ..}]}
  static FourierSymbol from_json(const std::string& text);
};

struct FluxRational {
  long p = 1, q = 1;
  double target = 1;    // value being approximated
  double residual = 0;  // |p/q - target|
  double value() const { return double(p) / double(q); }
  double delta() const { return value() - 1; }

  FluxRational() = default;
  FluxRational(long p, long q);
  // best continued-fraction approximation with q <= qmax
  static FluxRational approximate(double value, long qmax = 200);
};

// Fractions p/q in [lo, hi] with q <= order, increasing.
std::vector<FluxRational> farey(int order, double lo = 0, double hi = 1);

// q x q Bloch matrix of sum_k a_k rho(s k), s^2 = p/q, at phases (t1, t2).
Eigen::MatrixXcd bloch_matrix(const std::vector<FourierTerm>& terms, const FluxRational& flux, double t1, double t2);

struct BandSpectrum {
  FluxRational flux;
  int m = 0;
  int q = 0;
  std::vector<double> sheets;  // m*m rows of q sorted eigenvalues, phases in [0, 1/q)^2
  std::vector<Band> sheet_ranges;
  double merge_tol = 0;
  Spectrum spectrum;
  double max_hermitian_defect = 0;
  bool refined = false;  // sheet extremes polished by local search
};

// Band ends of sheets are polished by a local search when q <= refine_qmax.
BandSpectrum harper_spectrum(const FourierSymbol& sym, const FluxRational& flux, int m = 32, int refine_qmax = 32);

// The symbol quantized on a torus of length L = q * periods with F samples per unit,
// using the symplectically equivalent shifts (k1, (p/q) k2). Translating the symbol
// by (x0, w0) moves the Bloch phases the torus realizes.
LinearOperatorHandle harper_torus_operator(const FourierSymbol& sym, const FluxRational& flux, int periods = 0,
                                           int per_unit = 16, double x0 = 0, double w0 = 0);

// Bands of the torus operator over symbol translations spanning one phase cell: each
// sorted eigenvalue is followed on an s x s grid of translations, and with refine the
// extremes bordering gaps are polished by a local search. periods <= 0 picks the
// shortest torus that resolves the harmonics.
Spectrum harper_torus_spectrum(const FourierSymbol& sym, const FluxRational& flux, int shifts = 12, int periods = 0,
                               int per_unit = 4, bool refine = true);

struct BellissardReport {
  double eps = 0;
  double condition = 0;  // sup_t of both weighted sums
  double coeff_part = 0, deriv_part = 0;
  double m_norm_sq = 0;  // sup_t |sum_k a_k e^{2 pi i [k, .]}|^2 in M^{inf,1}_{0,2}
  bool finite_differences = false;
};

// Derivatives come from sym.dcoeff or, failing that, from differences over the grid.
BellissardReport check_bellissard_condition(const FourierSymbol& sym, const std::vector<double>& deltas, double eps,
                                            bool with_norm = true);

// |sum b_k e^{2 pi i [k, .]}|_{M^{inf,1}_{0,s}} of a period-1 trigonometric polynomial.
double periodic_symbol_norm(const std::vector<FourierTerm>& terms, double s, int per_unit = 8);

struct HarperSweep {
  std::vector<FluxRational> fluxes;
  std::vector<BandSpectrum> spectra;
  EdgeTrack track;
  LipschitzReport report;
  std::vector<std::string> failures;
  double bellissard = 0;  // condition value over the sweep, eps = 0.1
};

HarperSweep edge_sweep(const FourierSymbol& sym, const std::vector<FluxRational>& fluxes, int m = 32);

// flux, band_lo, band_hi rows
void write_bands_csv(const std::string& path, const std::vector<BandSpectrum>& spectra);

}  // namespace edgewise
