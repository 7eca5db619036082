#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "edgewise/errors.hpp"
#include "edgewise/tfcore.hpp"

using namespace edgewise;

namespace {

const GridSpec g512(1, 512, 32.0);

double phi1(double t) { return std::pow(2.0, 0.25) * std::exp(-kPi * t * t); }

// rho(z) phi in closed form
Signal shifted_gaussian(const GridSpec& g, double x, double w) {
  Signal s = Signal::zeros(g);
  for (int j = 0; j < g.n; ++j) {
    double t = g.box().axis(0).node(j);
    s.samples[j] = std::polar(1.0, -kPi * x * w + 2 * kPi * w * t) * phi1(t - x);
  }
  return s;
}

double max_dev(const cvec& a, const cvec& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_dev(const Signal& a, const Signal& b) {
  Signal d = a;
  for (std::size_t i = 0; i < d.samples.size(); ++i) d.samples[i] -= b.samples[i];
  return d.norm();
}

PhasePoint pp(double x, double w) { return PhasePoint({x}, {w}); }

}  // namespace

TEST_CASE("gaussian window is exact and unit norm") {
  Signal phi = gaussian(GridSpec(1, 256, 16.0));
  CHECK(std::abs(phi.norm() - 1.0) < 1e-12);
  for (int j = 0; j < 256; ++j)
    CHECK(phi.samples[j].real() == doctest::Approx(phi1(phi.grid.box().axis(0).node(j))).epsilon(1e-15));
}

TEST_CASE("hermite(0) equals the gaussian and hermite functions are orthonormal") {
  Signal h0 = make_window({WindowKind::hermite, 0}, g512);
  Signal phi = gaussian(g512);
  CHECK(max_dev(h0.samples, phi.samples) == 0.0);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      cplx ip = inner(make_window({WindowKind::hermite, a}, g512), make_window({WindowKind::hermite, b}, g512));
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("two-sided exponential matches the discrete closed-form normalization") {
  GridSpec g(1, 512, 64.0);
  Signal w = make_window({WindowKind::two_sided_exp, 0}, g);
  double h = g.step();
  // h * sum_j exp(-2|j|h) = h coth(h) on the infinite grid
  double c = 1.0 / std::sqrt(h / std::tanh(h));
  for (int j = 0; j < g.n; j += 17) {
    double t = g.box().axis(0).node(j);
    CHECK(std::abs(w.samples[j].real() - c * std::exp(-std::abs(t))) < 1e-12);
  }
  CHECK(std::abs(w.norm() - 1.0) < 1e-12);
}

TEST_CASE("unresolved windows are rejected") {
  CHECK_THROWS_AS(make_window({WindowKind::two_sided_exp, 0}, GridSpec(1, 256, 16.0)), ResolutionError);
  CHECK_THROWS_AS(make_window({WindowKind::gaussian, 0}, GridSpec(1, 16, 16.0)), ResolutionError);
  CHECK_THROWS_AS(GridSpec(1, 7, 1.0), DimensionError);
}

TEST_CASE("tf_shift matches the closed form and the composition law") {
  Signal phi = gaussian(g512);
  CHECK(max_dev(tf_shift(phi, pp(0, 0)).samples, phi.samples) < 1e-14);
  CHECK(max_dev(tf_shift(phi, pp(1.3, -0.7)).samples, shifted_gaussian(g512, 1.3, -0.7).samples) < 1e-12);

  Signal back = tf_shift(tf_shift(phi, pp(0.4, 1.1)), pp(-0.4, -1.1));
  CHECK(max_dev(back.samples, phi.samples) <= 1e-10);

  // rho((1,0)) rho((0,1)) phi = exp(i pi [(1,0),(0,1)]) rho((1,1)) phi, [.,.] = -1
  Signal lhs = tf_shift(tf_shift(phi, pp(0, 1)), pp(1, 0));
  Signal rhs = shifted_gaussian(g512, 1, 1);
  for (auto& v : rhs.samples) v *= std::polar(1.0, -kPi);
  CHECK(max_dev(lhs.samples, rhs.samples) <= 1e-8);
}

TEST_CASE("tf_shift refuses wrapping shifts") {
  Signal phi = gaussian(g512);
  CHECK_THROWS_AS(tf_shift(phi, pp(16.0, 0)), BoundaryWrapError);
  CHECK_THROWS_AS(tf_shift(phi, pp(0, 8.0)), BoundaryWrapError);
}

TEST_CASE("random shifts are unitary and satisfy composition and conjugation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2, 2);
  Signal f = make_window({WindowKind::hermite, 2}, g512);
  double worst_u = 0, worst_c = 0, worst_j = 0;
  for (int k = 0; k < 100; ++k) {
    PhasePoint z = pp(U(rng), U(rng)), zp = pp(U(rng), U(rng));
    worst_u = std::max(worst_u, std::abs(tf_shift(f, z).norm() - f.norm()));
    Signal a = tf_shift(tf_shift(f, zp), z);
    Signal b = tf_shift(f, z + zp);
    for (auto& v : b.samples) v *= std::polar(1.0, kPi * symplectic(z, zp));
    worst_c = std::max(worst_c, l2_dev(a, b));
    Signal c = tf_shift(tf_shift(tf_shift(f, z), zp), -z);
    Signal e = tf_shift(f, zp);
    for (auto& v : e.samples) v *= std::polar(1.0, 2 * kPi * symplectic(zp, z));
    worst_j = std::max(worst_j, l2_dev(c, e));
  }
  CHECK(worst_u <= 1e-10);
  CHECK(worst_c <= 1e-8);
  CHECK(worst_j <= 1e-8);
}

TEST_CASE("stft of the gaussian against itself") {
  Signal phi = gaussian(g512);
  BoxGrid pg = stft_grid(g512, 4, 4);
  PhaseFunction V = stft(phi, phi, pg);
  double err = 0;
  std::vector<double> p;
  for (std::size_t k = 0; k < V.samples.size(); ++k) {
    pg.point(k, p);
    double x = p[0], w = p[1];
    cplx ref = std::polar(std::exp(-kPi * (x * x + w * w) / 2), -kPi * x * w);
    err = std::max(err, std::abs(V.samples[k] - ref));
  }
  CHECK(err <= 1e-8);
  CHECK(std::abs(V.l2_norm() - 1.0) < 1e-10);
}

TEST_CASE("stft magnitude is covariant under grid shifts") {
  Signal f = make_window({WindowKind::hermite, 3}, g512);
  Signal phi = gaussian(g512);
  BoxGrid pg = stft_grid(g512, 2, 2);
  // w = (0.5, 0.375) lies on the phase grid: steps 1/8 and 1/16
  double wx = 0.5, ww = 0.375;
  PhaseFunction V = stft(f, phi, pg);
  PhaseFunction Vs = stft(tf_shift(f, pp(wx, ww)), phi, pg);
  int sx = static_cast<int>(std::lround(wx / pg.axis(0).step()));
  int sw = static_cast<int>(std::lround(ww / pg.axis(1).step()));
  int nx = pg.axis(0).n, nw = pg.axis(1).n;
  double err = 0;
  for (int i = sx; i < nx; ++i)
    for (int k = sw; k < nw; ++k)
      err = std::max(err, std::abs(std::abs(Vs.samples[i * nw + k]) - std::abs(V.samples[(i - sx) * nw + k - sw])));
  CHECK(err <= 1e-8);
}

TEST_CASE("stft rejects mismatched grids") {
  Signal a = gaussian(g512), b = gaussian(GridSpec(1, 256, 32.0));
  CHECK_THROWS_AS(stft(a, b, stft_grid(g512, 4, 4)), DimensionError);
}

TEST_CASE("wigner of the gaussian against direct quadrature") {
  Signal phi = gaussian(g512);
  PhaseFunction W = wigner(phi, phi);
  // independent oracle: trapezoid of the defining integral with the analytic gaussian
  auto direct = [](double x, double w) {
    double s = 0, dt = 1e-3;
    for (double t = -12; t <= 12; t += dt)
      s += phi1(x + t / 2) * phi1(x - t / 2) * std::cos(2 * kPi * w * t);
    return s * dt;
  };
  const BoxGrid& pg = W.grid;
  int nw = pg.axis(1).n;
  double err = 0, imag = 0;
  for (int i = 0; i < pg.axis(0).n; i += 37)
    for (int k = 0; k < nw; k += 41) {
      double x = pg.axis(0).node(i), w = pg.axis(1).node(k);
      if (std::abs(x) > 2 || std::abs(w) > 2) continue;
      err = std::max(err, std::abs(W.samples[i * nw + k] - direct(x, w)));
    }
  for (const auto& v : W.samples) imag = std::max(imag, std::abs(v.imag()));
  CHECK(err <= 1e-8);
  CHECK(imag <= 1e-12);
  // closed form 2 exp(-2 pi |z|^2) at the origin
  CHECK(std::abs(W.samples[(pg.axis(0).n / 2) * nw + nw / 2] - 2.0) < 1e-10);
}

TEST_CASE("wigner moyal normalization and evenness") {
  Signal f = tf_shift(make_window({WindowKind::hermite, 1}, g512), pp(0.3, -0.2));
  PhaseFunction W = wigner(f, f);
  cplx total = 0;
  for (const auto& v : W.samples) total += v;
  total *= W.grid.cell();
  CHECK(std::abs(total - f.norm() * f.norm()) <= 1e-8);

  Signal e = make_window({WindowKind::hermite, 2}, g512);
  PhaseFunction We = wigner(e, e);
  int n0 = We.grid.axis(0).n, n1 = We.grid.axis(1).n;
  double asym = 0;
  for (int i = 1; i < n0; ++i)
    for (int k = 1; k < n1; ++k)
      asym = std::max(asym, std::abs(We.samples[i * n1 + k] - We.samples[(n0 - i) * n1 + (n1 - k)]));
  CHECK(asym <= 1e-12);
}

TEST_CASE("zak transform: quasi-periodicity, unitarity and the gaussian zero") {
  Signal phi = gaussian(g512);
  double a = 1.0;
  PhaseFunction Z = zak(phi, a, 32, 32);
  // direct summation oracle with the analytic gaussian
  auto direct = [](double x, double w, double a) {
    cplx s = 0;
    for (int k = -40; k <= 40; ++k) s += phi1(x - a * k) * std::polar(1.0, 2 * kPi * a * k * w);
    return s;
  };
  double qerr = 0;
  for (int i = 0; i < 32; i += 3)
    for (int k = 0; k < 32; k += 5) {
      double x = Z.grid.axis(0).node(i), w = Z.grid.axis(1).node(k);
      cplx z = Z.samples[i * 32 + k];
      qerr = std::max(qerr, std::abs(direct(x + a, w, a) - std::polar(1.0, 2 * kPi * a * w) * z));
    }
  CHECK(qerr <= 1e-10);

  for (double aa : {1.0, 0.75, 1.5}) {
    PhaseFunction Za = zak(phi, aa, 64, 64);
    CHECK(std::abs(std::sqrt(aa) * Za.l2_norm() - phi.norm()) <= 1e-8);
  }
  // corner node (-1/2, -1/2) of the centered domain, equivalent to (1/2, 1/2)
  CHECK(std::abs(Z.samples[0]) <= 1e-8);
  CHECK(std::abs(direct(0.5, 0.5, 1.0)) <= 1e-8);
  CHECK_THROWS_AS(zak(phi, 20.0), CoverageError);
}

TEST_CASE("container and csv round trip") {
  Signal f = make_window({WindowKind::hermite, 1}, GridSpec(1, 64, 8.0));
  std::string path = "tfcore_roundtrip.edgw";
  save(path, f);
  Signal back = load_signal(path);
  CHECK(back.grid == f.grid);
  CHECK(max_dev(back.samples, f.samples) == 0.0);
  PhaseFunction W = wigner(f, f);
  save(path, W);
  PhaseFunction Wb = load_phase_function(path);
  CHECK(Wb.grid == W.grid);
  CHECK(max_dev(Wb.samples, W.samples) == 0.0);
  CHECK_THROWS(load_signal(path));
  std::remove(path.c_str());
}

TEST_CASE("d = 2 smoke test") {
  GridSpec g(2, 40, 7.0);
  Signal phi = gaussian(g);
  CHECK(std::abs(phi.norm() - 1.0) < 1e-12);
  PhasePoint z({0.3, -0.4}, {0.5, 0.25});
  CHECK(std::abs(tf_shift(phi, z).norm() - 1.0) < 1e-12);
  PhaseFunction W = wigner(phi, phi);
  cplx total = 0;
  for (const auto& v : W.samples) total += v;
  CHECK(std::abs(total * W.grid.cell() - 1.0) < 1e-10);
  PhaseFunction V = stft(phi, phi, stft_grid(g, 2, 2));
  CHECK(std::abs(V.l2_norm() - 1.0) < 1e-8);
}
