#include <algorithm>

#include "edgewise/harper.hpp"
#include "verify/common.hpp"

namespace edgewise::verify {

namespace {

const char* kSuite = "harper";

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

Check exact_edges(const Options& opt) {
  return guarded(kSuite, "flux 1 gives [-4, 4] and flux 1/2 gives +-2 sqrt 2", opt, [&] {
    auto one = harper_spectrum(FourierSymbol::harper(), FluxRational(1, 1));
    auto half = harper_spectrum(FourierSymbol::harper(), FluxRational(1, 2));
    const double r2 = 2 * std::sqrt(2.0);
    double e = std::max({std::abs(one.spectrum.lower() + 4), std::abs(one.spectrum.upper() - 4),
                         std::abs(half.spectrum.lower() + r2), std::abs(half.spectrum.upper() - r2)});
    if (one.spectrum.bands().size() != 1) e = INFINITY;
    return make_check(kSuite, "flux 1 gives [-4, 4] and flux 1/2 gives +-2 sqrt 2", e, 1e-6, opt,
                      str("flux 1: [", one.spectrum.lower(), ", ", one.spectrum.upper(), "], flux 1/2: [",
                          half.spectrum.lower(), ", ", half.spectrum.upper(), "]"));
  });
}

Check torus_vs_bloch(const Options& opt) {
  const std::string name = "bloch bands against torus quantization for q <= 8";
  return guarded(kSuite, name, opt, [&] {
    double worst = 0;
    int count = 0;
    std::string where;
    for (const auto& sym : {FourierSymbol::harper(), skew_symbol()})
      for (const auto& f : farey(8, 0.1, 1.0)) {
        auto bloch = harper_spectrum(sym, f, 64);
        auto torus = harper_torus_spectrum(sym, f);
        auto gb = detect_gaps(bloch.spectrum, 0.05), gt = detect_gaps(torus, 0.05);
        double e = std::max(std::abs(torus.lower() - bloch.spectrum.lower()),
                            std::abs(torus.upper() - bloch.spectrum.upper()));
        if (gb.gaps.size() != gt.gaps.size()) {
          e = INFINITY;
        } else {
          for (std::size_t i = 0; i < gb.gaps.size(); ++i)
            e = std::max({e, std::abs(gt.gaps[i].lo - gb.gaps[i].lo), std::abs(gt.gaps[i].hi - gb.gaps[i].hi)});
        }
        ++count;
        if (e > worst || !std::isfinite(e)) {
          worst = e;
          where = str(sym.name, " at ", f.p, "/", f.q);
        }
      }
    return make_check(kSuite, name, worst, 1e-3, opt,
                      str(count, " (symbol, flux) pairs, edges and gaps wider than 0.05; worst ", where));
  });
}

// Gap edges of flux 1/3 along p/(3p - 1) -> 1/3 against 3 |delta| C_P / L(g).
Check gap_bound(const Options& opt) {
  const std::string name = "flux 1/3 gap edges obey the polynomial-probe bound";
  return guarded(kSuite, name, opt, [&] {
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
    if (g0.gaps.size() != 2) return make_check(kSuite, name, INFINITY, 1, opt, "flux 1/3 does not show two gaps");
    double worst = 0;
    int used = 0;
    for (std::size_t i = 1; i < specs.size(); ++i) {
      auto m = match_gaps(g0, detect_gaps(specs[i]));
      bool clean = m.pairs.size() == 2;
      for (auto& p : m.pairs) clean = clean && !p.ambiguous;
      if (!clean) break;  // largest unambiguous prefix
      ++used;
      double dd = std::abs(vals[i] - vals[0]);
      for (auto& p : m.pairs) {
        double bound = 3 * dd * probe.c_p / g0.gaps[p.a].length();
        worst = std::max({worst, std::abs(p.d_lo) / bound, std::abs(p.d_hi) / bound});
      }
    }
    if (used == 0) return make_check(kSuite, name, INFINITY, 1, opt, "no unambiguous gap match");
    return make_check(kSuite, name, worst, 1, opt,
                      str("value = max |dE| / (3 |d delta| C_P / L), C_P = ", probe.c_p, ", ", used,
                          " fluxes down to ", fl[used].p, "/", fl[used].q));
  });
}

}  // namespace

Checks harper_edges(const Options& opt) { return {exact_edges(opt), torus_vs_bloch(opt), gap_bound(opt)}; }

Checks harper_extra(const Options& opt) {
  Checks out;
  out.push_back(guarded(kSuite, "bloch matrices are hermitian and spectra lie in [-sum |a|, sum |a|]", opt, [&] {
    double herm = 0, excess = 0;
    for (const auto& sym : {FourierSymbol::harper(), skew_symbol(), FourierSymbol::almost_mathieu(0.5)})
      for (const auto& f : farey(10, 0.1, 1.0)) {
        auto b = harper_spectrum(sym, f);
        herm = std::max(herm, b.max_hermitian_defect);
        double l1 = sym.l1(f.delta());
        excess = std::max({excess, b.spectrum.upper() - l1, -l1 - b.spectrum.lower()});
      }
    // the range bound is exact; the defect is measured against 1e-12
    double v = std::max(herm / 1e-12, excess > 0 ? INFINITY : 0.0);
    return make_check(kSuite, "bloch matrices are hermitian and spectra lie in [-sum |a|, sum |a|]", v, 1, opt,
                      str("max hermitian defect ", herm, ", max range excess ", excess));
  }));
  out.push_back(guarded(kSuite, "hofstadter edge quotients are refinement-stable", opt, [&] {
    auto sw = edge_sweep(FourierSymbol::harper(), farey(12, 0.0, 1.0));
    EdgeTrack outer = sw.track;
    outer.names.resize(2);
    outer.series.resize(2);
    auto rep = lipschitz_fit(outer);
    double v = sw.failures.empty() ? drift(rep.coarse_max, rep.max_quotient) : INFINITY;
    return make_check(kSuite, "hofstadter edge quotients are refinement-stable", v, 0.25, opt,
                      str(sw.fluxes.size(), " Farey fluxes; max quotient ", rep.max_quotient, ", every other flux ",
                          rep.coarse_max, "; bellissard condition ", sw.bellissard));
  }));
  return out;
}

}  // namespace edgewise::verify
