#pragma once

#include <functional>
#include <memory>
#include <mutex>

#include "edgewise/modnorm.hpp"
#include "edgewise/operator.hpp"
#include "edgewise/tfcore.hpp"

namespace edgewise {

// Immutable samples of a function on R^{2d}; x-axes first, then w-axes.
class SymbolGrid {
 public:
  SymbolGrid() = default;
  SymbolGrid(BoxGrid g, cvec samples);
  static SymbolGrid from_function(const BoxGrid& g, const std::function<cplx(const std::vector<double>&)>& fn);
  static SymbolGrid from_phase_function(const PhaseFunction& F) { return SymbolGrid(F.grid, F.samples); }

  const BoxGrid& grid() const { return grid_; }
  const cvec& samples() const { return samples_; }
  int d() const { return grid_.rank() / 2; }
  bool is_real() const { return is_real_; }
  // Continuous Fourier transform samples on the dual grid, computed once.
  const cvec& fourier() const;
  BoxGrid dual_grid() const;

 private:
  struct Cache {
    std::once_flag once;
    cvec fhat;
  };
  BoxGrid grid_;
  cvec samples_;
  bool is_real_ = false;
  std::shared_ptr<Cache> cache_;
};

// Dual grid: frequency nodes (j - n/2)/len, i.e. axis (n, n/len).
BoxGrid dual_of(const BoxGrid& g);

// Symbol with given Fourier samples on the dual of g.
SymbolGrid from_fourier(const BoxGrid& g, const cvec& fhat);

// U F(x, w) = F(w, -x); the inverse is U^{-1} F(x, w) = F(-w, x).
SymbolGrid symplectic_flip(const SymbolGrid& F, bool inverse = false);

struct QuantizeOptions {
  int dense_limit = 1024;     // dense kernel when n^d <= dense_limit
  double alias_tol = 1e-8;    // spectral tail allowed at the symbol's band edge
};

// Midpoint (Weyl) quantization on signals of `target`; the symbol must sit on
// weyl_grid(target).
LinearOperatorHandle quantize(const SymbolGrid& sigma, const GridSpec& target, const QuantizeOptions& opt = {});

// rho(F) = sum_z F(z) rho(z) * cell over a grid whose x-steps are multiples of h
// and whose w-steps are multiples of 1/len.
LinearOperatorHandle spreading(const SymbolGrid& F, const GridSpec& target);

// Direct quadrature of F natural G with kernel exp(-i pi [z - z', z']);
// both on the same grid.
SymbolGrid twisted_convolution(const SymbolGrid& F, const SymbolGrid& G);

// sigma # tau through F(sigma # tau) = F(sigma) natural F(tau).
SymbolGrid twisted_product(const SymbolGrid& sigma, const SymbolGrid& tau);

// D_a sigma(z) = sigma(a z) by band-limited interpolation.
SymbolGrid dilate(const SymbolGrid& sigma, double a);

struct BumpProfile {
  // theta(r) = 1 for r <= 1, 0 for r >= 2, smooth exp(-1/t) transition
  double operator()(double r) const;
  std::vector<double> samples(int count = 257) const;  // on [0, 2]
};

// F^{-1}(theta_R * F sigma)
SymbolGrid truncate(const SymbolGrid& sigma, double R, const BumpProfile& theta = {});

// Phi_delta * F with Phi_delta(z) = delta^{-d} exp(-pi |z|^2 / delta) on R^{2d}.
SymbolGrid heat_smooth(const SymbolGrid& F, double delta);

NormEstimate fl1_norm(const SymbolGrid& f);

// Multiply by a function of the frequency variable.
SymbolGrid fourier_multiply(const SymbolGrid& s, const std::function<double(const std::vector<double>&)>& m);

}  // namespace edgewise
