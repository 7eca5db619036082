#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "edgewise/errors.hpp"
#include "edgewise/spectra.hpp"
#include "edgewise/weyl.hpp"

using namespace edgewise;

namespace {

// almost Mathieu psi_{n+1} + psi_{n-1} + 2 cos(2 pi (n p/q + t2)) psi_n, Bloch phase t1
Eigen::MatrixXcd mathieu_block(int p, int q, double t1, double t2) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(q, q);
  for (int j = 0; j < q; ++j) {
    H(j, j) += 2 * std::cos(2 * kPi * (double(j) * p / q + t2));
    H((j + 1) % q, j) += std::polar(1.0, j == q - 1 ? 2 * kPi * t1 : 0.0);
    H(j, (j + 1) % q) += std::polar(1.0, j == q - 1 ? -2 * kPi * t1 : 0.0);
  }
  return H;
}

std::vector<Band> mathieu_bands(int p, int q, int m) {
  std::vector<Band> b(q, Band{1e300, -1e300});
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mathieu_block(p, q, double(a) / m, double(c) / m));
      for (int k = 0; k < q; ++k) {
        b[k].lo = std::min(b[k].lo, es.eigenvalues()(k));
        b[k].hi = std::max(b[k].hi, es.eigenvalues()(k));
      }
    }
  return b;
}

Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N(0, 1);
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(N(rng), N(rng));
  return 0.5 * (a + a.adjoint()) / std::sqrt(double(n));
}

double opnorm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m.rows() - 1)));
}

}  // namespace

TEST_CASE("extreme eigenvalues of a diagonal") {
  std::vector<double> d;
  for (int i = 1; i <= 10; ++i) d.push_back(i);
  auto op = LinearOperatorHandle::diagonal(d);
  auto r = extreme_eigs(op);
  CHECK(r.dense);
  CHECK(r.lower == doctest::Approx(1).epsilon(1e-14));
  CHECK(r.upper == doctest::Approx(10).epsilon(1e-14));
  EigConfig lz;
  lz.dense_limit = 0;
  auto s = extreme_eigs(op, lz);
  CHECK(std::abs(s.lower - 1) <= 1e-8);
  CHECK(std::abs(s.upper - 10) <= 1e-8);
}

TEST_CASE("extreme eigenvalues of the gaussian projection") {
  GridSpec gs(1, 64, 8.0);
  SymbolGrid w = SymbolGrid::from_function(weyl_grid(gs), [](const std::vector<double>& z) {
    return cplx(2 * std::exp(-2 * kPi * (z[0] * z[0] + z[1] * z[1])), 0);
  });
  auto r = extreme_eigs(quantize(w, gs));
  CHECK(std::abs(r.lower) <= 1e-6);
  CHECK(std::abs(r.upper - 1) <= 1e-6);
}

TEST_CASE("lanczos on a block-diagonal flux 1/2 operator") {
  const int m = 24;
  std::vector<Eigen::MatrixXcd> blocks;
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) blocks.push_back(mathieu_block(1, 2, double(a) / m, double(c) / m));
  LinearOperatorHandle op;
  op.dim = 2 * m * m;
  op.hermitian = true;
  op.apply_fn = [&blocks](const cplx* in, cplx* out) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Eigen::Map<const Eigen::Vector2cd> x(in + 2 * b);
      Eigen::Map<Eigen::Vector2cd> y(out + 2 * b);
      y = blocks[b] * x;
    }
  };
  EigConfig lz;
  lz.dense_limit = 0;
  auto r = extreme_eigs(op, lz);
  CHECK(r.iterations > 0);
  CHECK(std::abs(r.upper - 2 * std::sqrt(2.0)) <= 1e-6);
  CHECK(std::abs(r.lower + 2 * std::sqrt(2.0)) <= 1e-6);
}

TEST_CASE("lanczos agrees with the dense solver on random hermitian matrices") {
  EigConfig lz;
  lz.dense_limit = 0;
  for (unsigned s = 0; s < 20; ++s) {
    int n = 40 + 17 * s;
    Eigen::MatrixXcd A = random_hermitian(n, s);
    auto op = LinearOperatorHandle::from_dense(A, true);
    auto ev = full_spectrum(op);
    auto r = extreme_eigs(op, lz);
    CHECK(std::abs(r.lower - ev.front()) <= 1e-8);
    CHECK(std::abs(r.upper - ev.back()) <= 1e-8);
  }
}

TEST_CASE("non-hermitian operators are rejected") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
  A(0, 1) = 1;
  auto op = LinearOperatorHandle::from_dense(A, false);
  CHECK_THROWS_AS(extreme_eigs(op), PreconditionError);
}

TEST_CASE("edges from norms of shifted operators") {
  auto I = LinearOperatorHandle::identity(6);
  auto e = edges_via_norms(I, 2.0);
  CHECK(std::abs(e.lower - 1) <= 1e-12);
  CHECK(std::abs(e.upper - 1) <= 1e-12);

  Eigen::MatrixXcd A = random_hermitian(50, 99);
  auto op = LinearOperatorHandle::from_dense(A, true);
  auto ev = full_spectrum(op);
  double nA = std::max(std::abs(ev.front()), std::abs(ev.back()));
  for (double lam : {2 * nA, 3 * nA}) {
    auto r = edges_via_norms(op, lam);
    CHECK(std::abs(r.lower - ev.front()) <= 1e-8);
    CHECK(std::abs(r.upper - ev.back()) <= 1e-8);
  }

  auto bad = LinearOperatorHandle::diagonal({-5, 1});
  CHECK_THROWS_AS(edges_via_norms(bad, 1.0), PreconditionError);
  CHECK_THROWS_AS(edges_via_norms(bad, -1.0), PreconditionError);
}

TEST_CASE("edges move by at most the norm of the perturbation") {
  for (unsigned s = 0; s < 100; ++s) {
    int n = 8 + s % 13;
    Eigen::MatrixXcd A1 = random_hermitian(n, 1000 + s);
    Eigen::MatrixXcd A2 = A1 + 0.1 * (s % 7 + 1) * random_hermitian(n, 5000 + s);
    auto e1 = full_spectrum(LinearOperatorHandle::from_dense(A1, true));
    auto e2 = full_spectrum(LinearOperatorHandle::from_dense(A2, true));
    double d = opnorm(A1 - A2);
    double dl = std::abs(e1.front() - e2.front()), du = std::abs(e1.back() - e2.back());
    CHECK(dl <= d + 1e-12);
    CHECK(du <= d + 1e-12);
    // |(|A1| - |A2|)| <= 2 max of the edge differences
    CHECK(std::abs(opnorm(A1) - opnorm(A2)) <= 2 * std::max(dl, du) + 1e-12);
  }
}

TEST_CASE("gap detection") {
  auto s = Spectrum::from_eigenvalues({1.0, 0.0});
  auto g = detect_gaps(s, 0.1);
  REQUIRE(g.gaps.size() == 1);
  CHECK(g.gaps[0].lo == 0.0);
  CHECK(g.gaps[0].hi == 1.0);

  auto flat = Spectrum::from_bands(mathieu_bands(0, 1, 32));
  CHECK(flat.lower() == doctest::Approx(-4));
  CHECK(flat.upper() == doctest::Approx(4));
  CHECK(detect_gaps(flat).gaps.empty());

  auto third = Spectrum::from_bands(mathieu_bands(1, 3, 32));
  auto g3 = detect_gaps(third);
  REQUIRE(g3.gaps.size() == 2);
  CHECK(std::abs(g3.gaps[0].lo + g3.gaps[1].hi) <= 1e-9);
  CHECK(std::abs(g3.gaps[0].hi + g3.gaps[1].lo) <= 1e-9);
}

TEST_CASE("detected gaps never contain spectrum") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> ev(20 + t);
    for (auto& v : ev) v = U(rng);
    auto s = Spectrum::from_eigenvalues(ev);
    for (auto& g : detect_gaps(s).gaps) {
      CHECK_FALSE(s.meets(g.lo, g.hi));
      CHECK(g.length() > s.eta());
    }
    std::vector<Band> b;
    for (int k = 0; k + 1 < static_cast<int>(ev.size()); k += 2) b.push_back({ev[k], ev[k + 1]});
    auto sb = Spectrum::from_bands(b);
    for (auto& g : detect_gaps(sb).gaps) CHECK_FALSE(sb.meets(g.lo, g.hi));
  }
}

TEST_CASE("gap matching") {
  GapList a;
  a.gaps = {{-1.0, -0.5}, {0.2, 0.6}, {1.0, 2.0}};
  auto id = match_gaps(a, a);
  REQUIRE(id.pairs.size() == 3);
  for (auto& p : id.pairs) {
    CHECK(p.a == p.b);
    CHECK(p.d_lo == 0.0);
    CHECK(p.d_hi == 0.0);
  }
  GapList b = a;
  for (auto& g : b.gaps) {
    double s = 0.01 * g.length();
    g.lo += s;
    g.hi += s;
  }
  auto sh = match_gaps(a, b);
  REQUIRE(sh.pairs.size() == 3);
  CHECK(sh.orphans_a.empty());
  for (auto& p : sh.pairs) {
    CHECK(std::abs(p.d_lo - 0.01 * a.gaps[p.a].length()) <= 1e-15);
    CHECK(std::abs(p.d_hi - 0.01 * a.gaps[p.a].length()) <= 1e-15);
  }
  GapList c;
  c.gaps = {{0.25, 0.55}};
  auto part = match_gaps(a, c);
  CHECK(part.pairs.size() == 1);
  CHECK(part.orphans_a.size() == 2);
}

TEST_CASE("polynomial probe") {
  std::vector<double> deltas;
  for (int i = 0; i <= 10; ++i) deltas.push_back(0.01 * i);
  std::function<LinearOperatorHandle(double)> constant = [](double) {
    return LinearOperatorHandle::diagonal({-1, 0.5, 2});
  };
  CHECK(p2_probe(constant, deltas, 2.0).c_p == 0.0);

  std::function<LinearOperatorHandle(double)> scalar = [](double d) {
    return LinearOperatorHandle::diagonal(std::vector<double>(10, d));
  };
  auto pr = p2_probe(scalar, deltas, 1.0);
  CHECK(pr.betas[2] == 0.0);
  CHECK(pr.gammas[2] == 0.0);
  // |delta1^2 - delta2^2| / |delta1 - delta2| = delta1 + delta2
  CHECK(std::abs(pr.quotient(2, 2) - 0.19) <= 1e-12);
  CHECK(pr.quotient(2, 2) <= 0.2);
  CHECK(pr.c_p >= pr.quotient(2, 2));
}

TEST_CASE("lipschitz fits") {
  EdgeTrack t;
  for (int i = 0; i < 6; ++i) t.params.push_back(0.1 * i);
  t.names = {"lin", "const"};
  std::vector<double> lin, cst;
  for (double p : t.params) {
    lin.push_back(2 * p + 1);
    cst.push_back(3);
  }
  t.series = {lin};
  auto r = lipschitz_fit(t);
  CHECK(std::abs(r.max_quotient - 2) <= 1e-12);
  CHECK(r.stable);
  t.series = {cst};
  CHECK(lipschitz_fit(t).max_quotient == 0.0);
  t.params.resize(2);
  CHECK_THROWS_AS(lipschitz_fit(t), PreconditionError);
}

TEST_CASE("edge tracking follows gaps along a chain") {
  std::vector<double> params = {0, 1, 2, 3};
  std::vector<Spectrum> specs;
  for (double p : params) specs.push_back(Spectrum::from_bands({{-2, -1 + 0.01 * p}, {0.5 + 0.02 * p, 2}}));
  auto t = track_edges(params, specs);
  REQUIRE(t.series.size() == 4);
  CHECK(t.names[2] == "gap0.lo");
  for (std::size_t i = 0; i < params.size(); ++i) {
    CHECK(std::abs(t.series[2][i] - (-1 + 0.01 * params[i])) <= 1e-15);
    CHECK(std::abs(t.series[3][i] - (0.5 + 0.02 * params[i])) <= 1e-15);
  }
  auto r = lipschitz_fit(t);
  CHECK(std::abs(r.max_quotient - 0.02) <= 1e-12);
}
