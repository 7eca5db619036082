#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "edgewise/spectra.hpp"
#include "verify/common.hpp"

namespace edgewise::verify {

namespace {

const char* kSuite = "spectra";

Eigen::MatrixXcd random_hermitian(int n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0, 1);
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(N(rng), N(rng));
  return 0.5 * (a + a.adjoint()) / std::sqrt(double(n));
}

double herm_norm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m.rows() - 1)));
}

}  // namespace

Checks spectra_suite(const Options& opt) {
  Checks out;
  out.push_back(guarded(kSuite, "lanczos against the dense solver", opt, [&] {
    EigConfig lz;
    lz.dense_limit = 0;
    double worst = 0;
    for (int s = 0; s < 20; ++s) {
      int n = 40 + 17 * s;
      auto op = LinearOperatorHandle::from_dense(random_hermitian(n, opt.seed + s), true);
      auto ev = full_spectrum(op);
      auto r = extreme_eigs(op, lz);
      worst = std::max({worst, std::abs(r.lower - ev.front()), std::abs(r.upper - ev.back())});
    }
    return make_check(kSuite, "lanczos against the dense solver", worst, 1e-8, opt,
                      "20 random hermitian matrices, n = 40..363, absolute edge error");
  }));
  out.push_back(guarded(kSuite, "edges from norms of shifted operators", opt, [&] {
    double worst = 0;
    for (int s = 0; s < 10; ++s) {
      Eigen::MatrixXcd A = random_hermitian(30 + 7 * s, opt.seed + 100 + s);
      auto op = LinearOperatorHandle::from_dense(A, true);
      auto ev = full_spectrum(op);
      double nA = std::max(std::abs(ev.front()), std::abs(ev.back()));
      for (double lam : {2 * nA, 3 * nA}) {
        auto r = edges_via_norms(op, lam);
        worst = std::max({worst, std::abs(r.lower - ev.front()), std::abs(r.upper - ev.back())});
      }
    }
    return make_check(kSuite, "edges from norms of shifted operators", worst, 1e-8, opt,
                      "sigma_+ = |A + lam| - lam, sigma_- = lam - |A - lam| for lam = 2|A|, 3|A|");
  }));
  out.push_back(guarded(kSuite, "norm difference is bounded by twice the edge difference", opt, [&] {
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
      int n = 8 + s % 13;
      Eigen::MatrixXcd A1 = random_hermitian(n, opt.seed + 1000 + s);
      Eigen::MatrixXcd A2 = A1 + 0.1 * (s % 7 + 1) * random_hermitian(n, opt.seed + 5000 + s);
      auto e1 = full_spectrum(LinearOperatorHandle::from_dense(A1, true));
      auto e2 = full_spectrum(LinearOperatorHandle::from_dense(A2, true));
      double edge = std::max(std::abs(e1.front() - e2.front()), std::abs(e1.back() - e2.back()));
      double lhs = std::abs(herm_norm(A1) - herm_norm(A2));
      // also the edges move by at most |A1 - A2|
      double d = herm_norm(A1 - A2);
      worst = std::max({worst, lhs - 2 * edge, edge - d});
    }
    return make_check(kSuite, "norm difference is bounded by twice the edge difference", worst, 1e-12, opt,
                      "100 random pairs; value = largest violation");
  }));
  out.push_back(guarded(kSuite, "detected gaps contain no spectrum", opt, [&] {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(-3, 3);
    int bad = 0, total = 0;
    for (int t = 0; t < 50; ++t) {
      std::vector<double> ev(20 + t);
      for (auto& v : ev) v = U(rng);
      auto s = Spectrum::from_eigenvalues(ev);
      for (auto& g : detect_gaps(s).gaps) {
        ++total;
        bad += s.meets(g.lo, g.hi) || !(g.length() > s.eta());
      }
      std::sort(ev.begin(), ev.end());
      std::vector<Band> b;
      for (std::size_t k = 0; k + 1 < ev.size(); k += 2) b.push_back({ev[k], ev[k + 1]});
      auto sb = Spectrum::from_bands(b);
      for (auto& g : detect_gaps(sb).gaps) {
        ++total;
        bad += sb.meets(g.lo, g.hi);
      }
    }
    return make_check(kSuite, "detected gaps contain no spectrum", bad, 0, opt, str(total, " gaps checked"));
  }));
  return out;
}

}  // namespace edgewise::verify
