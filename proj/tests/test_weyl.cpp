#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "edgewise/errors.hpp"
#include "edgewise/weyl.hpp"

using namespace edgewise;

namespace {

const GridSpec gs(1, 64, 8.0);

double opnorm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

SymbolGrid gauss_symbol(const BoxGrid& g, double c = 1.0) {
  return SymbolGrid::from_function(g, [c](const std::vector<double>& z) {
    return cplx(std::exp(-kPi * c * (z[0] * z[0] + z[1] * z[1])), 0);
  });
}

// exp(2 pi i [w, z]) with w = (xw, ww)
SymbolGrid plane_wave(const BoxGrid& g, double xw, double ww) {
  return SymbolGrid::from_function(g, [=](const std::vector<double>& z) {
    return std::polar(1.0, 2 * kPi * (z[0] * ww - xw * z[1]));
  });
}

// matrix of rho(w) via tf_shift on unit vectors
Eigen::MatrixXcd shift_matrix(double xw, double ww) {
  int n = gs.n;
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    Signal e = Signal::zeros(gs);
    e.samples[j] = 1;
    Signal r = tf_shift(e, PhasePoint({xw}, {ww}));
    for (int i = 0; i < n; ++i) m(i, j) = r.samples[i];
  }
  return m;
}

}  // namespace

TEST_CASE("constant symbol quantizes to the identity") {
  BoxGrid wg = weyl_grid(gs);
  SymbolGrid one = SymbolGrid::from_function(wg, [](const std::vector<double>&) { return cplx(1, 0); });
  auto op = quantize(one, gs);
  CHECK(op.hermitian);
  CHECK(opnorm(op.to_dense() - Eigen::MatrixXcd::Identity(gs.n, gs.n)) <= 1e-8);
}

TEST_CASE("plane waves quantize to phase-space shifts") {
  BoxGrid wg = weyl_grid(gs);
  // exp(2 pi i [w, z]) -> rho(w); exp(2 pi i [z, w]) = exp(2 pi i [-w, z]) -> rho(-w)
  double xw = 3.0 / 8, ww = 0.25;
  auto op = quantize(plane_wave(wg, xw, ww), gs);
  CHECK(opnorm(op.to_dense() - shift_matrix(xw, ww)) <= 1e-6);
  auto op2 = quantize(plane_wave(wg, -xw, -ww), gs);
  CHECK(opnorm(op2.to_dense() - shift_matrix(-xw, -ww)) <= 1e-6);
  CHECK_FALSE(op.hermitian);
}

TEST_CASE("shifted wigner symbol quantizes to the rank-one projection") {
  BoxGrid wg = weyl_grid(gs);
  double zx = 1.0, zw = 0.5;
  SymbolGrid s = SymbolGrid::from_function(wg, [=](const std::vector<double>& z) {
    double r2 = (z[0] - zx) * (z[0] - zx) + (z[1] - zw) * (z[1] - zw);
    return cplx(2 * std::exp(-2 * kPi * r2), 0);
  });
  auto op = quantize(s, gs);
  CHECK(op.hermitian);
  Eigen::MatrixXcd m = op.to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  auto ev = es.eigenvalues();
  CHECK(std::abs(ev(gs.n - 1) - 1.0) <= 1e-6);
  for (int k = 0; k < gs.n - 1; ++k) CHECK(std::abs(ev(k)) <= 1e-6);
  // projection onto rho(z) phi, samples scaled by h
  Signal g = tf_shift(gaussian(gs), PhasePoint({zx}, {zw}));
  Eigen::VectorXcd v(gs.n);
  for (int i = 0; i < gs.n; ++i) v(i) = g.samples[i];
  Eigen::MatrixXcd q = gs.step() * v * v.adjoint();
  CHECK(opnorm(m - q) <= 1e-6);
}

TEST_CASE("quantize rejects foreign grids and aliased symbols") {
  CHECK_THROWS_AS(quantize(gauss_symbol(square_phase_grid(1, 64, 8.0)), gs), DimensionError);
  BoxGrid wg = weyl_grid(gs);
  // discontinuous in x: spectrum reaches the band edge
  SymbolGrid step = SymbolGrid::from_function(wg, [](const std::vector<double>& z) {
    return cplx(z[0] > 0.3 ? 1.0 : 0.0, 0);
  });
  CHECK_THROWS_AS(quantize(step, gs), ResolutionError);
}

TEST_CASE("real symbols quantize to hermitian operators") {
  BoxGrid wg = weyl_grid(gs);
  SymbolGrid s = SymbolGrid::from_function(wg, [](const std::vector<double>& z) {
    return cplx(std::exp(-kPi * (z[0] * z[0] / 2 + z[1] * z[1])) * (1 + z[0] * z[1]), 0);
  });
  auto op = quantize(s, gs);
  CHECK(op.hermitian);
  CHECK(hermiticity_defect(op, 8, 3) <= 1e-10);
  Eigen::MatrixXcd m = op.to_dense();
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("matrix-free and dense quantization agree") {
  BoxGrid wg = weyl_grid(gs);
  SymbolGrid s = gauss_symbol(wg, 0.5);
  QuantizeOptions mf;
  mf.dense_limit = 0;
  auto a = quantize(s, gs), b = quantize(s, gs, mf);
  cvec v = random_vector(gs.n, 5);
  cvec x = a.apply(v), y = b.apply(v);
  double err = 0;
  for (int i = 0; i < gs.n; ++i) err = std::max(err, std::abs(x[i] - y[i]));
  CHECK(err <= 1e-13);
}

TEST_CASE("spreading of point masses") {
  BoxGrid wg = weyl_grid(gs);
  BoxGrid sgrid = symplectic_flip(SymbolGrid(dual_of(wg), cvec(wg.size()))).grid();
  double cell = sgrid.cell();
  auto delta_at = [&](double x, double w) {
    return SymbolGrid::from_function(sgrid, [=](const std::vector<double>& z) {
      return cplx(std::abs(z[0] - x) < 1e-9 && std::abs(z[1] - w) < 1e-9 ? 1.0 / cell : 0.0, 0);
    });
  };
  CHECK(opnorm(spreading(delta_at(0, 0), gs).to_dense() - Eigen::MatrixXcd::Identity(gs.n, gs.n)) <= 1e-12);
  CHECK(opnorm(spreading(delta_at(0.5, 0.375), gs).to_dense() - shift_matrix(0.5, 0.375)) <= 1e-10);
}

TEST_CASE("spreading of the flipped fourier transform equals quantization") {
  BoxGrid wg = weyl_grid(gs);
  SymbolGrid s = SymbolGrid::from_function(wg, [](const std::vector<double>& z) {
    return cplx(std::exp(-kPi * (z[0] * z[0] + 2 * z[1] * z[1] + z[0] * z[1])), 0);
  });
  SymbolGrid shat(dual_of(wg), s.fourier());
  auto A = spreading(symplectic_flip(shat), gs).to_dense();
  auto B = quantize(s, gs).to_dense();
  CHECK(opnorm(A - B) <= 1e-6 * opnorm(B));
}

TEST_CASE("twisted product: unit, plane waves, gaussians") {
  BoxGrid wg = weyl_grid(gs);
  SymbolGrid one = SymbolGrid::from_function(wg, [](const std::vector<double>&) { return cplx(1, 0); });
  SymbolGrid tau = gauss_symbol(wg, 0.7);
  SymbolGrid r = twisted_product(one, tau);
  double e = 0;
  for (std::size_t k = 0; k < r.samples().size(); ++k) e = std::max(e, std::abs(r.samples()[k] - tau.samples()[k]));
  CHECK(e <= 1e-10);

  // exp(2 pi i [z, w]) # exp(2 pi i [z, w']) = exp(i pi [w, w']) exp(2 pi i [z, w + w'])
  double wx = 0.25, ww = 0.5, vx = -0.375, vw = 0.125;
  auto pw_zw = [&](double x, double w) { return plane_wave(wg, -x, -w); };
  SymbolGrid p = twisted_product(pw_zw(wx, ww), pw_zw(vx, vw));
  double sym = vx * ww - wx * vw;  // [w, w']
  SymbolGrid ref = pw_zw(wx + vx, ww + vw);
  double pe = 0;
  for (std::size_t k = 0; k < p.samples().size(); ++k)
    pe = std::max(pe, std::abs(p.samples()[k] - std::polar(1.0, kPi * sym) * ref.samples()[k]));
  CHECK(pe <= 1e-8);

  // gaussians: closed form (4/5) exp(-8 pi |z|^2 / 5) and the operator product
  SymbolGrid g = gauss_symbol(wg);
  SymbolGrid gg = twisted_product(g, g);
  SymbolGrid closed = SymbolGrid::from_function(wg, [](const std::vector<double>& z) {
    return cplx(0.8 * std::exp(-1.6 * kPi * (z[0] * z[0] + z[1] * z[1])), 0);
  });
  double ce = 0;
  for (std::size_t k = 0; k < gg.samples().size(); ++k) ce = std::max(ce, std::abs(gg.samples()[k] - closed.samples()[k]));
  CHECK(ce <= 1e-10);
  auto Q = quantize(g, gs).to_dense();
  auto Qgg = quantize(gg, gs).to_dense();
  CHECK(opnorm(Q * Q - Qgg) <= 1e-6 * opnorm(Q * Q));
}

TEST_CASE("twisted convolution: point masses and the fourier path") {
  BoxGrid pg = square_phase_grid(1, 64, 8.0);
  double cell = pg.cell();
  auto delta_at = [&](double x, double w) {
    return SymbolGrid::from_function(pg, [=](const std::vector<double>& z) {
      return cplx(std::abs(z[0] - x) < 1e-9 && std::abs(z[1] - w) < 1e-9 ? 1.0 / cell : 0.0, 0);
    });
  };
  SymbolGrid G = gauss_symbol(pg, 0.8);
  SymbolGrid r = twisted_convolution(delta_at(0, 0), G);
  double e = 0;
  for (std::size_t k = 0; k < r.samples().size(); ++k) e = std::max(e, std::abs(r.samples()[k] - G.samples()[k]));
  CHECK(e <= 1e-12);

  double wx = 0.5, ww = 0.25, vx = -0.75, vw = 1.0;
  SymbolGrid c = twisted_convolution(delta_at(wx, ww), delta_at(vx, vw));
  // F at z' = w, G at z - z' = w': kernel exp(-i pi [w', w])
  double k = wx * vw - vx * ww;
  std::vector<double> z;
  for (std::size_t f = 0; f < c.samples().size(); ++f) {
    pg.point(f, z);
    bool at = std::abs(z[0] - wx - vx) < 1e-9 && std::abs(z[1] - ww - vw) < 1e-9;
    cplx ref = at ? std::polar(1.0 / cell, -kPi * k) : cplx(0);
    CHECK(std::abs(c.samples()[f] - ref) <= 1e-9);
  }

  // F(g # g) from the closed form against F(g) natural F(g)
  BoxGrid wg = weyl_grid(gs);
  SymbolGrid g = gauss_symbol(wg);
  SymbolGrid gh(dual_of(wg), g.fourier());
  SymbolGrid conv = twisted_convolution(gh, gh);
  SymbolGrid closed = SymbolGrid::from_function(wg, [](const std::vector<double>& z) {
    return cplx(0.8 * std::exp(-1.6 * kPi * (z[0] * z[0] + z[1] * z[1])), 0);
  });
  const cvec& ch = closed.fourier();
  double num = 0, den = 0;
  for (std::size_t f = 0; f < ch.size(); ++f) {
    num = std::max(num, std::abs(conv.samples()[f] - ch[f]));
    den = std::max(den, std::abs(ch[f]));
  }
  CHECK(num <= 1e-6 * den);
}

TEST_CASE("twisted convolution detects wrap") {
  BoxGrid pg = square_phase_grid(1, 32, 4.0);
  SymbolGrid G = SymbolGrid::from_function(pg, [](const std::vector<double>& z) {
    return cplx(std::exp(-kPi * ((z[0] - 1.2) * (z[0] - 1.2) + z[1] * z[1])), 0);
  });
  CHECK_THROWS_AS(twisted_convolution(G, G), WrapError);
}

TEST_CASE("dilation") {
  BoxGrid g = square_phase_grid(1, 128, 16.0);
  SymbolGrid s = gauss_symbol(g);
  SymbolGrid same = dilate(s, 1.0);
  CHECK(same.samples() == s.samples());
  for (double a : {0.5, 0.8, 1.25, 1.5}) {
    SymbolGrid da = dilate(s, a);
    SymbolGrid ref = gauss_symbol(g, a * a);
    double e = 0;
    for (std::size_t k = 0; k < ref.samples().size(); ++k) e = std::max(e, std::abs(da.samples()[k] - ref.samples()[k]));
    CHECK(e <= 1e-10);
  }
  CHECK_THROWS_AS(dilate(s, 6.0), ResolutionError);
  CHECK_THROWS_AS(dilate(s, 0.1), ResolutionError);
}

TEST_CASE("bump profile") {
  BumpProfile th;
  CHECK(th(0) == 1.0);
  CHECK(th(1) == 1.0);
  CHECK(th(2) == 0.0);
  CHECK(th(3) == 0.0);
  double prev = 1;
  for (double v : th.samples()) {
    CHECK(v >= 0);
    CHECK(v <= 1);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK(std::abs(th(1.5) - 0.5) < 1e-15);
}

TEST_CASE("truncation") {
  BoxGrid g = square_phase_grid(1, 128, 16.0);
  SymbolGrid s = gauss_symbol(g);
  // dual nodes lie within radius 4 sqrt(2) < 6
  SymbolGrid t = truncate(s, 6.0);
  double e = 0;
  for (std::size_t k = 0; k < s.samples().size(); ++k) e = std::max(e, std::abs(t.samples()[k] - s.samples()[k]));
  CHECK(e <= 1e-12);
  CHECK(t.is_real());
  SymbolGrid t8 = truncate(s, 8.0);
  cvec diff(s.samples().size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = s.samples()[k] - t8.samples()[k];
  NormConfig cfg;
  cfg.tail_tol = 0;
  CHECK(box_norm(diff, g, M(kInf, 1), cfg).value <= 1e-6);
}

TEST_CASE("heat smoothing") {
  BoxGrid g = square_phase_grid(1, 128, 16.0);
  SymbolGrid c = SymbolGrid::from_function(g, [](const std::vector<double>& z) { return cplx(std::cos(2 * kPi * z[0]), 0); });
  for (double delta : {1e-3, 1e-2, 1e-1}) {
    SymbolGrid h = heat_smooth(c, delta);
    double e = 0;
    for (std::size_t k = 0; k < h.samples().size(); ++k)
      e = std::max(e, std::abs(h.samples()[k] - std::exp(-kPi * delta) * c.samples()[k]));
    CHECK(e <= 1e-10);
  }
  SymbolGrid s = gauss_symbol(g, 0.3);
  SymbolGrid h = heat_smooth(s, 1e-8);
  double e = 0;
  for (std::size_t k = 0; k < h.samples().size(); ++k) e = std::max(e, std::abs(h.samples()[k] - s.samples()[k]));
  CHECK(e <= 1e-6);
}

TEST_CASE("fourier L1 norms") {
  BoxGrid g = square_phase_grid(1, 128, 16.0);
  SymbolGrid s = gauss_symbol(g);
  CHECK(std::abs(fl1_norm(s).value - 1.0) <= 1e-10);
  SymbolGrid s2 = gauss_symbol(g, 4.0);  // D_2 of the gaussian
  CHECK(std::abs(fl1_norm(s2).value - fl1_norm(s).value) <= 1e-8);

  // exp(pi delta |z|^2 / 2) theta_R with R <= delta^{-1/2}
  BumpProfile th;
  double lo = 1e300, hi = 0;
  for (double delta : {0.01, 0.04, 0.25}) {
    double R = 1 / std::sqrt(delta);
    BoxGrid gg = square_phase_grid(1, 512, std::ceil(4.6 * R));
    SymbolGrid f = SymbolGrid::from_function(gg, [&](const std::vector<double>& z) {
      double r2 = z[0] * z[0] + z[1] * z[1];
      return cplx(std::exp(kPi * delta * r2 / 2) * th(std::sqrt(r2) / R), 0);
    });
    double v = fl1_norm(f).value;
    MESSAGE("delta " << delta << " R " << R << " FL1 " << v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // bounded uniformly in delta: the three values agree within 25%
  CHECK(hi <= 1.25 * lo);
}
