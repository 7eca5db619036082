#include "edgewise/harper.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "edgewise/errors.hpp"
#include "edgewise/io.hpp"
#include "edgewise/modnorm.hpp"
#include "edgewise/weyl.hpp"

namespace edgewise {

namespace {

long mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

double knorm(int k1, int k2) { return std::sqrt(double(k1) * k1 + double(k2) * k2); }

}  // namespace

std::vector<FourierTerm> FourierSymbol::terms(double delta) const {
  std::vector<FourierTerm> out;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      cplx a = coeff(k1, k2, delta);
      if (a != cplx(0)) out.push_back({k1, k2, a});
    }
  return out;
}

void FourierSymbol::validate(double delta) const {
  if (!coeff) throw ConfigError("symbol " + name + " has no coefficients");
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      cplx a = coeff(k1, k2, delta), b = coeff(-k1, -k2, delta);
      if (std::abs(a - std::conj(b)) > 1e-14 * (1 + std::abs(a)))
        throw PreconditionError("symbol " + name + " is not real: a_{-k} != conj(a_k)");
    }
  for (int k : {K + 1, -K - 1})
    for (int j = -K - 1; j <= K + 1; ++j)
      if (coeff(k, j, delta) != cplx(0) || coeff(j, k, delta) != cplx(0))
        throw PreconditionError("symbol " + name + " has harmonics beyond its support radius");
}

double FourierSymbol::l1(double delta) const {
  double s = 0;
  for (auto& t : terms(delta)) s += std::abs(t.a);
  return s;
}

FourierSymbol FourierSymbol::harper() {
  FourierSymbol s = almost_mathieu(1.0);
  s.name = "harper";
  return s;
}

FourierSymbol FourierSymbol::almost_mathieu(double lambda) {
  FourierSymbol s;
  s.name = "almost_mathieu";
  s.K = 1;
  s.coeff = [lambda](int k1, int k2, double) -> cplx {
    if (k2 == 0 && std::abs(k1) == 1) return 1.0;
    if (k1 == 0 && std::abs(k2) == 1) return lambda;
    return 0.0;
  };
  s.dcoeff = [](int, int, double) { return cplx(0); };
  return s;
}

FourierSymbol FourierSymbol::table(std::vector<FourierTerm> terms, std::string name) {
  FourierSymbol s;
  s.name = std::move(name);
  s.K = 0;
  for (auto& t : terms) s.K = std::max({s.K, std::abs(t.k1), std::abs(t.k2)});
  auto tab = std::make_shared<std::vector<FourierTerm>>(std::move(terms));
  s.coeff = [tab](int k1, int k2, double) {
    cplx a = 0;
    for (auto& t : *tab)
      if (t.k1 == k1 && t.k2 == k2) a += t.a;
    return a;
  };
  s.dcoeff = [](int, int, double) { return cplx(0); };
  return s;
}

FourierSymbol FourierSymbol::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("symbol json: ") + e.what());
  }
  FourierSymbol s;
  if (j.contains("builtin")) {
    std::string b = j.at("builtin").get<std::string>();
    if (b == "harper")
      s = harper();
    else if (b == "almost_mathieu")
      s = almost_mathieu(j.value("lambda", 1.0));
    else
      throw ConfigError("unknown built-in symbol " + b);
  } else if (j.contains("terms")) {
    std::vector<FourierTerm> t;
    for (auto& e : j.at("terms")) {
      if (!e.contains("k") || e.at("k").size() != 2) throw ConfigError("symbol term needs k = [k1, k2]");
      t.push_back({e.at("k")[0].get<int>(), e.at("k")[1].get<int>(), cplx(e.value("re", 0.0), e.value("im", 0.0))});
    }
    s = table(std::move(t), j.value("name", std::string("table")));
  } else {
    throw ConfigError("symbol json needs \"builtin\" or \"terms\"");
  }
  s.validate(0.0);
  return s;
}

FluxRational::FluxRational(long p_, long q_) {
  if (p_ <= 0 || q_ <= 0) throw PreconditionError("flux must be a positive fraction");
  long g = std::gcd(p_, q_);
  p = p_ / g;
  q = q_ / g;
  target = value();
  residual = 0;
}

FluxRational FluxRational::approximate(double v, long qmax) {
  if (!(v > 0) || !std::isfinite(v)) throw RationalizationError("flux must be positive and finite");
  if (qmax < 1) throw RationalizationError("denominator cap must be positive");
  // continued fraction with the last semiconvergent (best approximation under the cap)
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(x);
    long ai = static_cast<long>(a);
    long q2 = q0 + ai * q1;
    if (q2 > qmax) break;
    long p2 = p0 + ai * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = x - a;
    if (frac < 1e-12) break;
    x = 1 / frac;
  }
  long k = q1 > 0 ? (qmax - q0) / q1 : 0;
  long pb = p0 + k * p1, qb = q0 + k * q1;
  long pp = p1, qq = q1;
  if (qb > 0 && pb > 0 && std::abs(double(pb) / qb - v) < std::abs(double(pp) / qq - v)) {
    pp = pb;
    qq = qb;
  }
  if (pp <= 0) {
    // below 1/qmax
    pp = 1;
    qq = qmax;
  }
  FluxRational f(pp, qq);
  f.target = v;
  f.residual = std::abs(f.value() - v);
  return f;
}

std::vector<FluxRational> farey(int order, double lo, double hi) {
  std::vector<FluxRational> out;
  int pmax = static_cast<int>(std::ceil(hi * order)) + 1;
  for (int q = 1; q <= order; ++q)
    for (int p = 1; p <= pmax; ++p) {
      if (std::gcd(p, q) != 1) continue;
      double v = double(p) / q;
      if (v >= lo - 1e-15 && v <= hi + 1e-15) out.emplace_back(p, q);
    }
  std::sort(out.begin(), out.end(), [](const FluxRational& a, const FluxRational& b) { return a.p * b.q < b.p * a.q; });
  return out;
}

Eigen::MatrixXcd bloch_matrix(const std::vector<FourierTerm>& terms, const FluxRational& flux, double t1, double t2) {
  const long p = flux.p, q = flux.q;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(q, q);
  for (auto& t : terms) {
    // a_k e^{-i pi (p/q) k1 k2} (e^{2 pi i t2} C)^{k2} (e^{2 pi i t1} Sh)^{k1}
    long pk = mod(p * t.k1 * t.k2, 2 * q);
    cplx base = t.a * std::polar(1.0, -kPi * double(pk) / q + 2 * kPi * (t1 * t.k1 + t2 * t.k2));
    for (long j = 0; j < q; ++j) {
      long c = mod(p * t.k2 * j, q);
      H(j, mod(j - t.k1, q)) += base * std::polar(1.0, 2 * kPi * double(c) / q);
    }
  }
  return H;
}

BandSpectrum harper_spectrum(const FourierSymbol& sym, const FluxRational& flux, int m, int refine_qmax) {
  if (flux.q > 200) throw PreconditionError("harper_spectrum: denominator above 200");
  if (m < 32) throw PreconditionError("harper_spectrum: Bloch grid needs m >= 32");
  const double delta = flux.delta();
  sym.validate(delta);
  auto terms = sym.terms(delta);
  const int q = static_cast<int>(flux.q);
  BandSpectrum out;
  out.flux = flux;
  out.m = m;
  out.q = q;
  out.sheets.resize(std::size_t(m) * m * q);
  const double step = 1.0 / (double(m) * q);  // spectrum is 1/q-periodic in each phase
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Eigen::MatrixXcd H = bloch_matrix(terms, flux, a * step, b * step);
      out.max_hermitian_defect = std::max(out.max_hermitian_defect, (H - H.adjoint()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
      std::copy(es.eigenvalues().data(), es.eigenvalues().data() + q, out.sheets.begin() + (std::size_t(a) * m + b) * q);
    }
  out.sheet_ranges.assign(q, Band{1e300, -1e300});
  std::vector<std::pair<int, int>> arg_lo(q), arg_hi(q);
  double grad = 0;
  auto at = [&](int a, int b, int k) { return out.sheets[(std::size_t(a) * m + b) * q + k]; };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < q; ++k) {
        double e = at(a, b, k);
        if (e < out.sheet_ranges[k].lo) {
          out.sheet_ranges[k].lo = e;
          arg_lo[k] = {a, b};
        }
        if (e > out.sheet_ranges[k].hi) {
          out.sheet_ranges[k].hi = e;
          arg_hi[k] = {a, b};
        }
        // neighbours across the period boundary are the same sheets
        grad = std::max({grad, std::abs(at((a + 1) % m, b, k) - e), std::abs(at(a, (b + 1) % m, k) - e)});
      }
  if (q <= refine_qmax) {
    // pattern search from the best grid phase; sheets can have conical points
    // where grid sampling converges only linearly
    auto sheet = [&](double t1, double t2, int k) {
      Eigen::MatrixXcd H = bloch_matrix(terms, flux, t1, t2);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
      return es.eigenvalues()(k);
    };
    for (int k = 0; k < q; ++k)
      for (int sgn : {-1, 1}) {
        auto [a, b] = sgn < 0 ? arg_lo[k] : arg_hi[k];
        double t1 = a * step, t2 = b * step, h = step, best = sgn * sheet(t1, t2, k);
        for (int it = 0; it < 200 && h > 1e-9 * step; ++it) {
          double bt1 = t1, bt2 = t2;
          for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
              if (!i && !j) continue;
              double v = sgn * sheet(t1 + i * h, t2 + j * h, k);
              if (v > best) {
                best = v;
                bt1 = t1 + i * h;
                bt2 = t2 + j * h;
              }
            }
          if (bt1 == t1 && bt2 == t2) h *= 0.5;
          t1 = bt1;
          t2 = bt2;
        }
        if (sgn < 0)
          out.sheet_ranges[k].lo = -best;
        else
          out.sheet_ranges[k].hi = best;
      }
    out.refined = true;
  }
  out.merge_tol = grad;
  out.spectrum = Spectrum::from_bands(out.sheet_ranges, out.merge_tol);
  return out;
}

LinearOperatorHandle harper_torus_operator(const FourierSymbol& sym, const FluxRational& flux, int periods,
                                           int per_unit, double x0, double w0) {
  if (periods <= 0) periods = std::max<int>(1, static_cast<int>((24 + flux.q - 1) / flux.q));
  const double delta = flux.delta();
  sym.validate(delta);
  auto terms = sym.terms(delta);
  const double theta = flux.value();
  const int L = static_cast<int>(flux.q) * periods;
  GridSpec gs(1, L * per_unit, double(L));
  for (auto& t : terms)
    if (theta * std::abs(t.k2) >= 0.5 * per_unit || 2 * std::abs(t.k1) >= L)
      throw ResolutionError("harper_torus_operator: harmonics beyond the torus resolution");
  BoxGrid wg = weyl_grid(gs);
  // sum_k a_k e^{2 pi i [w_k, z]}, w_k = (k1, theta k2), [w, z] = x w_2 - w_1 w
  SymbolGrid s = SymbolGrid::from_function(wg, [&](const std::vector<double>& z) {
    cplx v = 0;
    for (auto& t : terms)
      v += t.a * std::polar(1.0, 2 * kPi * ((z[0] - x0) * theta * t.k2 - t.k1 * (z[1] - w0)));
    return v;
  });
  QuantizeOptions opt;
  opt.dense_limit = std::max(opt.dense_limit, gs.n);
  return quantize(s, gs, opt);
}

Spectrum harper_torus_spectrum(const FourierSymbol& sym, const FluxRational& flux, int shifts, int periods,
                               int per_unit, bool refine) {
  if (shifts < 2) throw PreconditionError("harper_torus_spectrum: need at least two shifts");
  // shortest torus with |k1| < L/2; a shift by exactly half the torus is averaged by quantize
  if (periods <= 0) periods = static_cast<int>(2 * sym.K / flux.q) + 1;
  const long L = flux.q * periods;
  // residue classes of the samples realize second phases in steps of gcd(p, F) / (q F)
  const long g = std::gcd(flux.p, static_cast<long>(per_unit));
  const double xcell = double(g) / (double(flux.p) * per_unit), wcell = 1.0 / L;
  const int n = static_cast<int>(L) * per_unit;
  // translating the symbol only rephases its coefficients, so each plane wave is quantized once
  const double theta = flux.value();
  auto terms = sym.terms(flux.delta());
  std::vector<Eigen::MatrixXcd> Q;
  for (auto& t : terms) {
    FourierSymbol one = FourierSymbol::table({{t.k1, t.k2, 1.0}, {-t.k1, -t.k2, 1.0}});
    // rho(w) = (c + i d) / 2 with c = rho(w) + rho(-w), d = -i rho(w) + i rho(-w), both real symbols
    FourierSymbol sn = FourierSymbol::table({{t.k1, t.k2, cplx(0, -1)}, {-t.k1, -t.k2, cplx(0, 1)}});
    if (t.k1 == 0 && t.k2 == 0) {
      Q.push_back(Eigen::MatrixXcd::Identity(n, n));
      continue;
    }
    Eigen::MatrixXcd c = harper_torus_operator(one, flux, periods, per_unit).to_dense();
    Eigen::MatrixXcd d = harper_torus_operator(sn, flux, periods, per_unit).to_dense();
    Q.push_back(0.5 * (c + cplx(0, 1) * d));
  }
  auto eigs = [&](double x0, double w0) {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t k = 0; k < terms.size(); ++k)
      H += terms[k].a * std::polar(1.0, -2 * kPi * (x0 * theta * terms[k].k2 - terms[k].k1 * w0)) * Q[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
    const auto& e = es.eigenvalues();
    return std::vector<double>(e.data(), e.data() + n);
  };
  std::vector<Band> idx(n, Band{1e300, -1e300});
  std::vector<std::pair<double, double>> arg_lo(n), arg_hi(n);
  std::vector<std::vector<double>> grid(std::size_t(shifts) * shifts);
  for (int a = 0; a < shifts; ++a)
    for (int b = 0; b < shifts; ++b) {
      double x0 = xcell * a / shifts, w0 = wcell * b / shifts;
      auto e = eigs(x0, w0);
      for (int i = 0; i < n; ++i) {
        if (e[i] < idx[i].lo) {
          idx[i].lo = e[i];
          arg_lo[i] = {x0, w0};
        }
        if (e[i] > idx[i].hi) {
          idx[i].hi = e[i];
          arg_hi[i] = {x0, w0};
        }
      }
      grid[std::size_t(a) * shifts + b] = std::move(e);
    }
  double grad = 0;
  for (int a = 0; a < shifts; ++a)
    for (int b = 0; b < shifts; ++b)
      for (int i = 0; i < n; ++i) {
        double e = grid[std::size_t(a) * shifts + b][i];
        grad = std::max({grad, std::abs(grid[std::size_t((a + 1) % shifts) * shifts + b][i] - e),
                         std::abs(grid[std::size_t(a) * shifts + (b + 1) % shifts][i] - e)});
      }
  if (refine) {
    Spectrum coarse = Spectrum::from_bands(idx, grad);
    auto is_edge = [&](double v) {
      for (auto& bd : coarse.bands())
        if (v == bd.lo || v == bd.hi) return true;
      return false;
    };
    for (int i = 0; i < n; ++i)
      for (int sgn : {-1, 1}) {
        double cur = sgn < 0 ? idx[i].lo : idx[i].hi;
        if (!is_edge(cur)) continue;
        auto [x0, w0] = sgn < 0 ? arg_lo[i] : arg_hi[i];
        double hx = xcell / shifts, hw = wcell / shifts, best = sgn * cur;
        for (int it = 0; it < 200 && hx > 1e-9 * xcell; ++it) {
          double bx = x0, bw = w0;
          for (int u = -1; u <= 1; ++u)
            for (int v = -1; v <= 1; ++v) {
              if (!u && !v) continue;
              double val = sgn * eigs(x0 + u * hx, w0 + v * hw)[i];
              if (val > best) {
                best = val;
                bx = x0 + u * hx;
                bw = w0 + v * hw;
              }
            }
          if (bx == x0 && bw == w0) {
            hx *= 0.5;
            hw *= 0.5;
          }
          x0 = bx;
          w0 = bw;
        }
        if (sgn < 0)
          idx[i].lo = -best;
        else
          idx[i].hi = best;
      }
  }
  return Spectrum::from_bands(idx, grad);
}

double periodic_symbol_norm(const std::vector<FourierTerm>& terms, double s, int per_unit) {
  int K = 0;
  for (auto& t : terms) K = std::max({K, std::abs(t.k1), std::abs(t.k2)});
  per_unit = std::max(per_unit, 2 * (K + 4));
  if (per_unit % 2) ++per_unit;
  const double L = 8;
  BoxGrid g = square_phase_grid(1, static_cast<int>(L) * per_unit, L);
  std::vector<double> z;
  cvec f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.point(i, z);
    cplx v = 0;
    for (auto& t : terms) v += t.a * std::polar(1.0, 2 * kPi * (z[0] * t.k2 - t.k1 * z[1]));
    f[i] = v;
  }
  NormConfig cfg;
  cfg.tail_tol = 0;  // periodic: the torus box holds whole periods
  return box_norm(f, g, M(kInf, 1, 0, s), cfg).value;
}

BellissardReport check_bellissard_condition(const FourierSymbol& sym, const std::vector<double>& deltas, double eps,
                                            bool with_norm) {
  if (deltas.empty()) throw PreconditionError("bellissard condition: empty parameter grid");
  BellissardReport r;
  r.eps = eps;
  r.finite_differences = !sym.dcoeff;
  if (!sym.dcoeff && deltas.size() < 2) throw PreconditionError("bellissard condition: missing derivative data");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    double t = deltas[i];
    double c = 0, d = 0;
    for (int k1 = -sym.K; k1 <= sym.K; ++k1)
      for (int k2 = -sym.K; k2 <= sym.K; ++k2) {
        double w = 1 + knorm(k1, k2);
        c += std::norm(sym.coeff(k1, k2, t)) * std::pow(w, 6 + 2 * eps);
        cplx da;
        if (sym.dcoeff) {
          da = sym.dcoeff(k1, k2, t);
        } else {
          std::size_t lo = i > 0 ? i - 1 : i, hi = i + 1 < deltas.size() ? i + 1 : i;
          da = (sym.coeff(k1, k2, deltas[hi]) - sym.coeff(k1, k2, deltas[lo])) / (deltas[hi] - deltas[lo]);
        }
        d += std::norm(da) * std::pow(w, 2 + 2 * eps);
      }
    if (c + d > r.condition) {
      r.condition = c + d;
      r.coeff_part = c;
      r.deriv_part = d;
    }
    if (with_norm) {
      double n = periodic_symbol_norm(sym.terms(t), 2);
      r.m_norm_sq = std::max(r.m_norm_sq, n * n);
    }
  }
  return r;
}

HarperSweep edge_sweep(const FourierSymbol& sym, const std::vector<FluxRational>& fluxes, int m) {
  HarperSweep out;
  std::vector<FluxRational> sorted = fluxes;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const FluxRational& a, const FluxRational& b) { return a.value() < b.value(); });
  std::vector<double> params;
  std::vector<Spectrum> specs;
  for (auto& f : sorted) {
    if (!params.empty() && f.value() <= params.back()) continue;
    try {
      BandSpectrum b = harper_spectrum(sym, f, m);
      params.push_back(f.value());
      specs.push_back(b.spectrum);
      out.fluxes.push_back(f);
      out.spectra.push_back(std::move(b));
    } catch (const Error& e) {
      out.failures.push_back(std::to_string(f.p) + "/" + std::to_string(f.q) + ": " + e.what());
    }
  }
  if (params.empty()) return out;
  out.track = track_edges(params, specs);
  if (params.size() >= 3) out.report = lipschitz_fit(out.track);
  std::vector<double> deltas;
  for (double v : params) deltas.push_back(v - 1);
  if (sym.dcoeff || deltas.size() >= 2) out.bellissard = check_bellissard_condition(sym, deltas, 0.1, false).condition;
  return out;
}

void write_bands_csv(const std::string& path, const std::vector<BandSpectrum>& spectra) {
  std::vector<std::vector<double>> rows;
  for (auto& s : spectra)
    for (auto& b : s.spectrum.bands()) rows.push_back({s.flux.value(), b.lo, b.hi});
  write_csv_rows(path, {"flux", "band_lo", "band_hi"}, rows);
}

}  // namespace edgewise
