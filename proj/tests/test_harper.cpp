#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>

#include "edgewise/errors.hpp"
#include "edgewise/harper.hpp"
#include "edgewise/io.hpp"

using namespace edgewise;

namespace {

// psi_{n+1} + psi_{n-1} + 2 cos(2 pi (n p/q + t2)) psi_n with Bloch twist only on the wrap bond
Eigen::VectorXd mathieu_eigs(int p, int q, double t1, double t2) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(q, q);
  for (int j = 0; j < q; ++j) {
    H(j, j) += 2 * std::cos(2 * kPi * (double(j) * p / q + t2));
    H((j + 1) % q, j) += std::polar(1.0, j == q - 1 ? 2 * kPi * t1 : 0.0);
    H(j, (j + 1) % q) += std::polar(1.0, j == q - 1 ? -2 * kPi * t1 : 0.0);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues();
}

FourierSymbol skew_symbol() {
  return FourierSymbol::table({{1, 0, 1.0},
                               {-1, 0, 1.0},
                               {0, 1, 0.7},
                               {0, -1, 0.7},
                               {1, 1, cplx(0, 0.3)},
                               {-1, -1, cplx(0, -0.3)},
                               {2, -1, cplx(0.1, 0.2)},
                               {-2, 1, cplx(0.1, -0.2)}},
                              "skew");
}

}  // namespace

TEST_CASE("commuting flux gives the range of the symbol") {
  auto b = harper_spectrum(FourierSymbol::harper(), FluxRational(1, 1));
  REQUIRE(b.spectrum.bands().size() == 1);
  CHECK(std::abs(b.spectrum.lower() + 4) <= 1e-6);
  CHECK(std::abs(b.spectrum.upper() - 4) <= 1e-6);
}

TEST_CASE("flux 1/2 edges") {
  auto b = harper_spectrum(FourierSymbol::harper(), FluxRational(1, 2));
  CHECK(std::abs(b.spectrum.upper() - 2 * std::sqrt(2.0)) <= 1e-6);
  CHECK(std::abs(b.spectrum.lower() + 2 * std::sqrt(2.0)) <= 1e-6);
}

TEST_CASE("bloch matrices match the almost Mathieu matrices") {
  auto terms = FourierSymbol::harper().terms(0);
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 3}, {2, 5}, {3, 7}, {5, 8}, {4, 3}}) {
    FluxRational f(p, q);
    for (double t1 : {0.0, 0.013, 0.07})
      for (double t2 : {0.0, 0.021, 0.11}) {
        Eigen::MatrixXcd H = bloch_matrix(terms, f, t1, t2);
        Eigen::VectorXd e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues();
        Eigen::VectorXd ref = mathieu_eigs(p, q, q * t1, t2);
        CHECK((e - ref).cwiseAbs().maxCoeff() <= 1e-10);
      }
  }
}

TEST_CASE("bloch matrices are hermitian and spectra are bounded by the coefficient sum") {
  for (auto sym : {FourierSymbol::harper(), skew_symbol(), FourierSymbol::almost_mathieu(0.5)})
    for (auto f : {FluxRational(1, 3), FluxRational(2, 7), FluxRational(5, 4), FluxRational(7, 12)}) {
      auto b = harper_spectrum(sym, f);
      CHECK(b.max_hermitian_defect <= 1e-12);
      double bound = sym.l1(f.delta());
      CHECK(b.spectrum.lower() >= -bound);
      CHECK(b.spectrum.upper() <= bound);
    }
}

TEST_CASE("non-real symbols and bad inputs are rejected") {
  auto bad = FourierSymbol::table({{1, 0, 1.0}});
  CHECK_THROWS_AS(harper_spectrum(bad, FluxRational(1, 2)), PreconditionError);
  CHECK_THROWS_AS(harper_spectrum(FourierSymbol::harper(), FluxRational(1, 201)), PreconditionError);
  CHECK_THROWS_AS(harper_spectrum(FourierSymbol::harper(), FluxRational(1, 2), 16), PreconditionError);
  CHECK_THROWS_AS(FluxRational(0, 3), PreconditionError);
  CHECK_THROWS_AS(FluxRational::approximate(-0.5), RationalizationError);
}

TEST_CASE("rationalization") {
  auto a = FluxRational::approximate(1.0 / 3);
  CHECK(a.p == 1);
  CHECK(a.q == 3);
  auto b = FluxRational::approximate(0.34);
  CHECK(b.p == 17);
  CHECK(b.q == 50);
  auto c = FluxRational::approximate(kPi - 3, 200);
  CHECK(c.p == 16);
  CHECK(c.q == 113);
  CHECK(c.residual == doctest::Approx(std::abs(16.0 / 113 - (kPi - 3))));
  auto g = FluxRational::approximate(std::sqrt(2.0), 100);
  CHECK(g.q <= 100);
  CHECK(g.residual <= 1e-4);
  FluxRational r(6, 4);
  CHECK(r.p == 3);
  CHECK(r.q == 2);
  CHECK(farey(5).size() == 10);
  CHECK(farey(12).size() == 46);
}

TEST_CASE("torus quantization agrees with the Bloch spectrum") {
  for (auto sym : {FourierSymbol::harper(), skew_symbol()})
    for (auto f : {FluxRational(1, 2), FluxRational(1, 3), FluxRational(2, 5), FluxRational(3, 7), FluxRational(3, 8)}) {
      auto bloch = harper_spectrum(sym, f, 64);
      auto torus = harper_torus_spectrum(sym, f);
      CHECK(std::abs(torus.lower() - bloch.spectrum.lower()) <= 1e-3);
      CHECK(std::abs(torus.upper() - bloch.spectrum.upper()) <= 1e-3);
      auto gb = detect_gaps(bloch.spectrum, 0.05), gt = detect_gaps(torus, 0.05);
      INFO(f.p << "/" << f.q << " " << sym.name);
      REQUIRE(gb.gaps.size() == gt.gaps.size());
      for (std::size_t i = 0; i < gb.gaps.size(); ++i) {
        CHECK(std::abs(gt.gaps[i].lo - gb.gaps[i].lo) <= 1e-3);
        CHECK(std::abs(gt.gaps[i].hi - gb.gaps[i].hi) <= 1e-3);
      }
    }
}

TEST_CASE("a single unshifted torus is a sub-spectrum") {
  auto f = FluxRational(2, 5);
  auto bloch = harper_spectrum(FourierSymbol::harper(), f, 64);
  auto ev = full_spectrum(harper_torus_operator(FourierSymbol::harper(), f));
  // Bloch bands are sampled, so allow the sheet sampling error at the band ends
  for (auto& g : detect_gaps(bloch.spectrum, 0.01).gaps)
    for (double e : ev) CHECK_FALSE((e > g.lo + 1e-4 && e < g.hi - 1e-4));
}

TEST_CASE("flux 1/3 has two symmetric gaps") {
  auto b = harper_spectrum(FourierSymbol::harper(), FluxRational(1, 3));
  auto g = detect_gaps(b.spectrum);
  REQUIRE(g.gaps.size() == 2);
  CHECK(std::abs(g.gaps[0].lo + g.gaps[1].hi) <= 1e-9);
  CHECK(std::abs(g.gaps[0].hi + g.gaps[1].lo) <= 1e-9);
}

TEST_CASE("bellissard condition") {
  auto h = check_bellissard_condition(FourierSymbol::harper(), {0.0}, 0.1, false);
  CHECK(h.condition == doctest::Approx(4 * std::pow(2.0, 6.2)).epsilon(1e-14));
  CHECK(h.deriv_part == 0.0);

  auto decaying = [](int K) {
    FourierSymbol s;
    s.name = "decay";
    s.K = K;
    s.coeff = [](int a, int b, double) { return cplx(std::pow(1 + std::sqrt(double(a * a + b * b)), -5.0), 0); };
    s.dcoeff = [](int, int, double) { return cplx(0); };
    return s;
  };
  // finite for eps < 1 (sum of (1+|k|)^{-4+2 eps} over Z^2); partial sums settle
  double s16 = check_bellissard_condition(decaying(16), {0.0}, 0.25, false).condition;
  double s32 = check_bellissard_condition(decaying(32), {0.0}, 0.25, false).condition;
  double s64 = check_bellissard_condition(decaying(64), {0.0}, 0.25, false).condition;
  CHECK(s64 - s32 < 0.75 * (s32 - s16));
  double d32 = check_bellissard_condition(decaying(32), {0.0}, 1.5, false).condition;
  double d64 = check_bellissard_condition(decaying(64), {0.0}, 1.5, false).condition;
  CHECK(d64 - d32 > check_bellissard_condition(decaying(16), {0.0}, 1.5, false).condition);

  FourierSymbol nod = FourierSymbol::harper();
  nod.dcoeff = nullptr;
  CHECK_THROWS_AS(check_bellissard_condition(nod, {0.0}, 0.1, false), PreconditionError);
  auto fd = check_bellissard_condition(nod, {0.0, 0.1}, 0.1, false);
  CHECK(fd.finite_differences);
  CHECK(fd.deriv_part == 0.0);
}

TEST_CASE("trigonometric polynomials: modulation norm against the coefficient sum") {
  // |sigma|_{M^{inf,1}_{0,s}} <= c_s sum |b_k| (1+|k|)^s <= c_s (sum (1+|k|)^{-2-2eps})^{1/2} (sum |b_k|^2 (1+|k|)^{2(1+s+eps)})^{1/2}
  const double s = 2, eps = 0.5;
  double cs = 0;
  for (int i = 0; i < 200000; ++i) {
    double r = (i + 0.5) * 1e-4;
    cs += std::pow(1 + r, s) * std::exp(-kPi * r * r) * 2 * kPi * r * 1e-4;
  }
  cs *= std::sqrt(2.0);
  // lattice sum of (1+|k|)^{-3} inside |k|_inf <= 300, tail bounded by the radial integral
  double zs = 0;
  for (int a = -300; a <= 300; ++a)
    for (int b = -300; b <= 300; ++b) zs += std::pow(1 + std::sqrt(double(a) * a + double(b) * b), -2 - 2 * eps);
  zs += 2 * kPi / 299.0;
  double C = cs * cs * zs;
  std::vector<std::vector<FourierTerm>> sets = {FourierSymbol::harper().terms(0), skew_symbol().terms(0),
                                                {{0, 0, 1.0}},
                                                {{2, 1, 0.5}, {-2, -1, 0.5}, {0, 2, cplx(0, 1)}, {0, -2, cplx(0, -1)}}};
  for (auto& t : sets) {
    double n = periodic_symbol_norm(t, s);
    double n2 = periodic_symbol_norm(t, s, 16);
    double w = 0;
    for (auto& x : t) w += std::norm(x.a) * std::pow(1 + std::sqrt(double(x.k1 * x.k1 + x.k2 * x.k2)), 2 * (1 + s + eps));
    MESSAGE("ratio " << n * n / w << " bound " << C);
    CHECK(n * n <= C * w);
    CHECK(std::abs(n - n2) <= 0.25 * n);
  }
}

TEST_CASE("constant symbol at equal flux gives identical edges") {
  auto a = harper_spectrum(FourierSymbol::harper(), FluxRational(2, 5));
  auto b = harper_spectrum(FourierSymbol::harper(), FluxRational(2, 5));
  CHECK(a.spectrum.lower() == b.spectrum.lower());
  CHECK(a.spectrum.upper() == b.spectrum.upper());
}

TEST_CASE("hofstadter edges are lipschitz in the flux") {
  auto sw = edge_sweep(FourierSymbol::harper(), farey(12, 0.0, 1.0));
  CHECK(sw.failures.empty());
  REQUIRE(sw.fluxes.size() == 46);
  EdgeTrack outer = sw.track;
  outer.names.resize(2);
  outer.series.resize(2);
  auto rep = lipschitz_fit(outer);
  MESSAGE("max " << rep.max_quotient << " coarse " << rep.coarse_max << " median " << rep.median_quotient);
  CHECK(std::isfinite(rep.max_quotient));
  CHECK(rep.stable);
  CHECK(std::isfinite(sw.report.max_quotient));
  CHECK(sw.bellissard > 0);
}

TEST_CASE("gap edges near flux 1/3 move within the polynomial-probe bound") {
  std::vector<FluxRational> fl = {FluxRational(1, 3)};
  for (int p : {33, 29, 25, 22, 20, 18, 17}) fl.emplace_back(p, 3 * p - 1);
  std::vector<double> vals;
  std::vector<Spectrum> specs;
  for (auto& f : fl) {
    vals.push_back(f.value());
    specs.push_back(harper_spectrum(FourierSymbol::harper(), f).spectrum);
  }
  auto family = [&](double v) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (vals[i] == v) return specs[i];
    return harper_spectrum(FourierSymbol::harper(), FluxRational::approximate(v)).spectrum;
  };
  const Spectrum& s0 = specs[0];
  double norm0 = std::max(std::abs(s0.lower()), std::abs(s0.upper()));
  auto probe = p2_probe(std::function<Spectrum(double)>(family), vals, norm0);
  auto g0 = detect_gaps(s0);
  REQUIRE(g0.gaps.size() == 2);
  for (std::size_t i = 1; i < specs.size(); ++i) {
    auto m = match_gaps(g0, detect_gaps(specs[i]));
    bool clean = m.pairs.size() == 2;
    for (auto& p : m.pairs) clean = clean && !p.ambiguous;
    if (!clean) break;  // largest unambiguous prefix
    double dd = std::abs(vals[i] - vals[0]);
    for (auto& p : m.pairs) {
      double bound = 3 * dd * probe.c_p / g0.gaps[p.a].length();
      CHECK(std::abs(p.d_lo) <= bound);
      CHECK(std::abs(p.d_hi) <= bound);
    }
  }
  MESSAGE("C_P " << probe.c_p);
}

TEST_CASE("symbols from json and band csv") {
  auto h = FourierSymbol::from_json(R"({"builtin": "almost_mathieu", "lambda": 0.5})");
  CHECK(h.coeff(0, 1, 0) == cplx(0.5));
  auto t = FourierSymbol::from_json(R"({"terms": [{"k": [1, 0], "re": 1}, {"k": [-1, 0], "re": 1}]})");
  CHECK(t.K == 1);
  CHECK_THROWS_AS(FourierSymbol::from_json(R"({"terms": [{"k": [1, 0], "im": 1}]})"), PreconditionError);
  CHECK_THROWS_AS(FourierSymbol::from_json("{"), ConfigError);
  CHECK_THROWS_AS(FourierSymbol::from_json(R"({"builtin": "nope"})"), ConfigError);

  std::vector<BandSpectrum> v = {harper_spectrum(FourierSymbol::harper(), FluxRational(1, 3))};
  std::string path = "harper_bands_test.csv";
  write_bands_csv(path, v);
  auto rows = read_csv_numbers(path);
  std::remove(path.c_str());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == doctest::Approx(1.0 / 3).epsilon(1e-16));
  CHECK(rows[2][2] == v[0].spectrum.upper());
}
