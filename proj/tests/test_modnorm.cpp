#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "edgewise/errors.hpp"
#include "edgewise/modnorm.hpp"

using namespace edgewise;

namespace {
const GridSpec g512(1, 512, 32.0);
}

TEST_CASE("gaussian modulation norms against analytic integrals") {
  Signal phi = gaussian(g512);
  // int exp(-pi |z|^2 / 2) dz = 2
  NormEstimate m1 = mod_norm(phi, M(1, 1));
  CHECK(std::abs(m1.value - 2.0) / 2.0 <= 1e-6);
  CHECK(m1.converged);
  CHECK_FALSE(m1.sup_lower_bound);
  // int sup_x exp(-pi (x^2 + w^2) / 2) dw = sqrt(2)
  NormEstimate minf1 = mod_norm(phi, M(kInf, 1));
  CHECK(std::abs(minf1.value - std::sqrt(2.0)) / std::sqrt(2.0) <= 1e-6);
  CHECK(minf1.sup_lower_bound);
  // M^2 = L^2
  CHECK(std::abs(mod_norm(phi, M(2, 2)).value - 1.0) <= 1e-8);
}

TEST_CASE("homogeneity and the zero signal") {
  Signal f = make_window({WindowKind::hermite, 2}, g512);
  Signal f3 = f;
  for (auto& v : f3.samples) v *= 3.0;
  for (NormSpec s : {M(1, 1), M(kInf, 1, 0, 2), W(kInf, 1), M(2, 1, 1, 1)}) {
    double a = box_norm(f.samples, f.grid.box(), s).value;
    double b = box_norm(f3.samples, f.grid.box(), s).value;
    CHECK(std::abs(b - 3 * a) <= 1e-12 * b);
  }
  CHECK(amalgam_norm(Signal::zeros(g512), W(kInf, 1)).value == 0.0);
}

TEST_CASE("amalgam norms of the self-dual gaussian") {
  Signal phi = gaussian(g512);
  CHECK(std::abs(amalgam_norm(phi, W(1, 1)).value - mod_norm(phi, M(1, 1)).value) <= 1e-6 * 2);
  // phi-hat = phi, so W^{inf,1}(phi-hat) against M^{inf,1}(phi)
  double w = amalgam_norm(phi, W(kInf, 1)).value;
  double m = mod_norm(phi, M(kInf, 1)).value;
  CHECK(std::abs(w - m) <= 0.05 * m);
}

TEST_CASE("tail errors are raised on insufficient coverage") {
  // gaussian shifted far to the edge of a short period
  GridSpec g(1, 64, 8.0);
  Signal f = Signal::zeros(g);
  for (int j = 0; j < g.n; ++j) {
    double t = g.box().axis(0).node(j);
    f.samples[j] = std::exp(-kPi * (t - 3.8) * (t - 3.8) / 4);
  }
  CHECK_THROWS_AS(mod_norm(f, M(1, 1)), TailError);
  NormConfig lax;
  lax.tail_tol = 0;
  NormEstimate e = mod_norm(f, M(1, 1), lax);
  CHECK(e.tail_bound > 1e-6);
}

TEST_CASE("fourier L1 norm of the phase-space gaussian") {
  BoxGrid g({Axis{128, 16.0}, Axis{128, 16.0}});
  cvec s = gaussian_on(g);
  for (auto& v : s) v /= std::sqrt(2.0);  // exp(-pi |z|^2)
  NormEstimate e = fourier_l1(s, g);
  CHECK(std::abs(e.value - 1.0) <= 1e-10);
  CHECK(e.converged);
}

TEST_CASE("relative separation by exact counting") {
  CHECK(PointSet::lattice(1, 1.0, 10).rel == 1);
  CHECK(PointSet::lattice(1, 0.5, 5).rel == 4);
  CHECK(PointSet::lattice(1, 1.0, 10).size() == 441);
  CHECK(PointSet().rel == 0);
  // two points closer than one in both coordinates share a cube
  PointSet two({PhasePoint({0.0}, {0.0}), PhasePoint({0.99}, {-0.5})});
  CHECK(two.rel == 2);
  PointSet apart({PhasePoint({0.0}, {0.0}), PhasePoint({1.0}, {0.0})});
  CHECK(apart.rel == 1);
}

TEST_CASE("measure norms scale with relative separation") {
  MeasureNorm empty = measure_norm(PointSet());
  CHECK(empty.norm.value == 0.0);
  CHECK(empty.rel == 0);
  std::vector<double> C;
  for (unsigned long long seed = 1; seed <= 10; ++seed) {
    PointSet L = PointSet::jittered(1, 0.2, 6, seed);
    MeasureNorm m = measure_norm(L, 0.05);
    CHECK(m.rel >= 1);
    C.push_back(m.norm.value / m.rel);
  }
  std::sort(C.begin(), C.end());
  double med = 0.5 * (C[4] + C[5]);
  MESSAGE("fitted C range " << C.front() << " .. " << C.back());
  for (double c : C) CHECK(std::abs(c - med) <= 0.2 * med);
}

TEST_CASE("point sets load from csv") {
  const char* path = "modnorm_points.csv";
  {
    std::ofstream o(path);
    o << "x,w\n0,0\n0.5,0.25\n1.5,-2\n";
  }
  PointSet p = PointSet::load_csv(path);
  CHECK(p.size() == 3);
  CHECK(p.points[1].w[0] == 0.25);
  CHECK(p.rel == 2);
  std::remove(path);
}
