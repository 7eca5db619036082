#include "edgewise/operator.hpp"

#include <random>

#include "edgewise/errors.hpp"

namespace edgewise {

cvec LinearOperatorHandle::apply(const cvec& v) const {
  if (static_cast<int>(v.size()) != dim) throw DimensionError("operator applied to a vector of wrong size");
  cvec out(dim);
  apply_fn(v.data(), out.data());
  return out;
}

Eigen::MatrixXcd LinearOperatorHandle::to_dense() const {
  if (dense) return *dense;
  Eigen::MatrixXcd m(dim, dim);
  cvec e(dim), col(dim);
  for (int j = 0; j < dim; ++j) {
    std::fill(e.begin(), e.end(), cplx(0));
    e[j] = 1;
    apply_fn(e.data(), col.data());
    for (int i = 0; i < dim; ++i) m(i, j) = col[i];
  }
  return m;
}

LinearOperatorHandle LinearOperatorHandle::from_dense(Eigen::MatrixXcd m, bool herm) {
  if (m.rows() != m.cols()) throw DimensionError("operator matrix must be square");
  LinearOperatorHandle h;
  h.dim = static_cast<int>(m.rows());
  auto p = std::make_shared<const Eigen::MatrixXcd>(std::move(m));
  h.dense = p;
  h.hermitian = herm;
  const int n = h.dim;
  h.apply_fn = [p, n](const cplx* in, cplx* out) {
    Eigen::Map<const Eigen::VectorXcd> x(in, n);
    Eigen::Map<Eigen::VectorXcd> y(out, n);
    y.noalias() = (*p) * x;
  };
  return h;
}

LinearOperatorHandle LinearOperatorHandle::identity(int dim) {
  LinearOperatorHandle h;
  h.dim = dim;
  h.hermitian = true;
  h.norm_hint = 1.0;
  h.apply_fn = [dim](const cplx* in, cplx* out) { std::copy(in, in + dim, out); };
  return h;
}

LinearOperatorHandle LinearOperatorHandle::diagonal(const std::vector<double>& d) {
  LinearOperatorHandle h;
  h.dim = static_cast<int>(d.size());
  h.hermitian = true;
  double mx = 0;
  for (double v : d) mx = std::max(mx, std::abs(v));
  h.norm_hint = mx;
  h.apply_fn = [d](const cplx* in, cplx* out) {
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] * in[i];
  };
  return h;
}

LinearOperatorHandle compose(const LinearOperatorHandle& a, const LinearOperatorHandle& b) {
  if (a.dim != b.dim) throw DimensionError("compose: dimension mismatch");
  LinearOperatorHandle h;
  h.dim = a.dim;
  h.hermitian = false;
  if (a.norm_hint && b.norm_hint) h.norm_hint = *a.norm_hint * *b.norm_hint;
  auto fa = a.apply_fn, fb = b.apply_fn;
  int n = a.dim;
  h.apply_fn = [fa, fb, n](const cplx* in, cplx* out) {
    cvec tmp(n);
    fb(in, tmp.data());
    fa(tmp.data(), out);
  };
  return h;
}

LinearOperatorHandle combine(cplx a, const LinearOperatorHandle& A, cplx b, const LinearOperatorHandle& B) {
  if (A.dim != B.dim) throw DimensionError("combine: dimension mismatch");
  LinearOperatorHandle h;
  h.dim = A.dim;
  h.hermitian = A.hermitian && B.hermitian && a.imag() == 0 && b.imag() == 0;
  if (A.norm_hint && B.norm_hint) h.norm_hint = std::abs(a) * *A.norm_hint + std::abs(b) * *B.norm_hint;
  auto fa = A.apply_fn, fb = B.apply_fn;
  int n = A.dim;
  h.apply_fn = [fa, fb, a, b, n](const cplx* in, cplx* out) {
    cvec tmp(n);
    fa(in, out);
    fb(in, tmp.data());
    for (int i = 0; i < n; ++i) out[i] = a * out[i] + b * tmp[i];
  };
  return h;
}

LinearOperatorHandle shifted(const LinearOperatorHandle& A, double lambda) {
  return combine(1.0, A, lambda, LinearOperatorHandle::identity(A.dim));
}

cvec random_vector(int dim, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  auto u = [&rng]() { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
  cvec v(dim);
  for (auto& x : v) x = cplx(u(), u());
  return v;
}

double hermiticity_defect(const LinearOperatorHandle& A, int probes, unsigned long long seed) {
  double worst = 0;
  for (int k = 0; k < probes; ++k) {
    cvec v = random_vector(A.dim, seed * 7919 + 2 * k);
    cvec w = random_vector(A.dim, seed * 7919 + 2 * k + 1);
    cvec Av = A.apply(v), Aw = A.apply(w);
    cplx l = 0, r = 0;
    double nv = 0, nw = 0, nav = 0;
    for (int i = 0; i < A.dim; ++i) {
      l += Av[i] * std::conj(w[i]);
      r += v[i] * std::conj(Aw[i]);
      nv += std::norm(v[i]);
      nw += std::norm(w[i]);
      nav += std::norm(Av[i]);
    }
    double scale = std::sqrt(nv * nw) * std::max(1.0, std::sqrt(nav / nv));
    worst = std::max(worst, std::abs(l - r) / scale);
  }
  return worst;
}

}  // namespace edgewise
