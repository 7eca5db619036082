#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>

#include "edgewise/grid.hpp"

namespace edgewise {

// Matrix-free operator on C^dim. Signals enter as their flat sample vectors;
// the grid weight h^d is constant, so adjoints and norms agree with L^2.
struct LinearOperatorHandle {
  int dim = 0;
  std::function<void(const cplx*, cplx*)> apply_fn;
  bool hermitian = false;
  std::optional<double> norm_hint;
  std::shared_ptr<const Eigen::MatrixXcd> dense;

  cvec apply(const cvec& v) const;
  void apply(const cplx* in, cplx* out) const { apply_fn(in, out); }
  Eigen::MatrixXcd to_dense() const;

  static LinearOperatorHandle from_dense(Eigen::MatrixXcd m, bool hermitian);
  static LinearOperatorHandle identity(int dim);
  static LinearOperatorHandle diagonal(const std::vector<double>& d);
};

LinearOperatorHandle compose(const LinearOperatorHandle& a, const LinearOperatorHandle& b);
// a * A + b * B
LinearOperatorHandle combine(cplx a, const LinearOperatorHandle& A, cplx b, const LinearOperatorHandle& B);
LinearOperatorHandle shifted(const LinearOperatorHandle& A, double lambda);

// max over random probes of |<Av, w> - <v, Aw>| / (|v| |w| max(1, |A v|/|v|))
double hermiticity_defect(const LinearOperatorHandle& A, int probes = 4, unsigned long long seed = 1);

cvec random_vector(int dim, unsigned long long seed);

}  // namespace edgewise
