#include "edgewise/modnorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <map>
#include <random>

#include "edgewise/errors.hpp"
#include "edgewise/fft.hpp"
#include "edgewise/io.hpp"

namespace edgewise {

NormSpec M(double p, double q, double s, double t) { return {p, q, s, t, Flavor::modulation}; }
NormSpec W(double p, double q, double s, double t) { return {p, q, s, t, Flavor::amalgam}; }

namespace {

const char* flavor_name(Flavor f) {
  switch (f) {
    case Flavor::modulation: return "modulation";
    case Flavor::amalgam: return "amalgam";
    case Flavor::fourier_l1: return "fourier_l1";
  }
  return "?";
}

nlohmann::json exponent(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

void check_exponent(double p) {
  if (!(p == 1 || p == 2 || std::isinf(p))) throw ConfigError("norm exponents must be 1, 2 or inf");
}

}  // namespace

std::string NormEstimate::to_json() const {
  nlohmann::json j;
  j["flavor"] = flavor_name(spec.flavor);
  j["p"] = exponent(spec.p);
  j["q"] = exponent(spec.q);
  j["s"] = spec.s;
  j["t"] = spec.t;
  j["value"] = value;
  j["tail_bound"] = tail_bound;
  j["coarse_value"] = coarse_value;
  j["converged"] = converged;
  j["sup_lower_bound"] = sup_lower_bound;
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : resolution.axes()) axes.push_back({{"n", a.n}, {"len", a.len}});
  j["grid"] = axes;
  return j.dump();
}

cvec gaussian_on(const BoxGrid& g) {
  const int D = g.rank();
  const double c = std::pow(2.0, D / 4.0);
  cvec out(g.size());
  std::vector<double> p;
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.point(k, p);
    double r2 = 0;
    for (double v : p) r2 += v * v;
    out[k] = c * std::exp(-kPi * r2);
  }
  return out;
}

BoxGrid norm_phase_grid(const BoxGrid& g, double step) {
  const int D = g.rank();
  std::vector<Axis> ax(2 * D);
  for (int i = 0; i < D; ++i) {
    const Axis& a = g.axis(i);
    int k = 1;
    for (int c = 1; c <= a.n / 2; ++c)
      if (a.n % c == 0 && (a.n / c) % 2 == 0 && c * a.step() <= step * (1 + 1e-12)) k = c;
    ax[i] = {a.n / k, a.len};
    int M = 2 * std::max(1, static_cast<int>(std::lround(0.5 / (step * a.step()))));
    ax[D + i] = {M, 1.0 / a.step()};
  }
  return BoxGrid(ax);
}

namespace {

double pw(double v, double p) { return p == 1 ? v : (p == 2 ? v * v : v); }
double root(double v, double p) { return p == 1 ? v : (p == 2 ? std::sqrt(v) : v); }

// Radial weights (1 + |p|)^e over a box grid.
std::vector<double> radial_weights(const BoxGrid& g, double e) {
  std::vector<double> w(g.size(), 1.0);
  if (e == 0) return w;
  std::vector<double> p;
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.point(k, p);
    double r = 0;
    for (double v : p) r += v * v;
    w[k] = std::pow(1 + std::sqrt(r), e);
  }
  return w;
}

std::vector<char> stride_mask(const BoxGrid& g, int stride) {
  std::vector<char> keep(g.size(), 1);
  if (stride == 1) return keep;
  std::vector<int> idx;
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.unravel(k, idx);
    for (int i = 0; i < g.rank(); ++i)
      if ((idx[i] - g.axis(i).n / 2) % stride != 0) keep[k] = 0;
  }
  return keep;
}

// Mixed norm of |V| on the phase grid, using every stride-th node per axis.
// Samples are x-major; the sweep below stays contiguous.
double mixed(const cvec& V, const BoxGrid& pg, const NormSpec& spec, int stride) {
  const int D = pg.rank() / 2;
  BoxGrid xg(std::vector<Axis>(pg.axes().begin(), pg.axes().begin() + D));
  BoxGrid wg(std::vector<Axis>(pg.axes().begin() + D, pg.axes().end()));
  const bool mod = spec.flavor == Flavor::modulation;
  // modulation: inner exponent p over x with weight s, outer q over w with weight t
  const double ex = mod ? spec.s : spec.t, ew = mod ? spec.t : spec.s;
  const std::vector<double> wx = radial_weights(xg, ex), ww = radial_weights(wg, ew);
  const std::vector<char> kx = stride_mask(xg, stride), kw = stride_mask(wg, stride);
  const double pin = mod ? spec.p : spec.q;  // exponent of the inner integral
  const double pout = mod ? spec.q : spec.p;
  const BoxGrid& inner_g = mod ? xg : wg;
  const BoxGrid& outer_g = mod ? wg : xg;
  const double cin = inner_g.cell() * std::pow(stride, D);
  const double cout = outer_g.cell() * std::pow(stride, D);
  const std::size_t nw = wg.size();

  auto combine = [](double acc, double v, double p) { return std::isinf(p) ? std::max(acc, v) : acc + pw(v, p); };
  auto finish = [](double acc, double c, double p) { return std::isinf(p) ? acc : root(acc * c, p); };

  double total = 0;
  if (mod) {
    // inner over x for each w: accumulate column-wise while reading rows
    std::vector<double> acc(nw, 0.0);
    for (std::size_t i = 0; i < xg.size(); ++i) {
      if (!kx[i]) continue;
      const cplx* row = V.data() + i * nw;
      for (std::size_t o = 0; o < nw; ++o)
        if (kw[o]) acc[o] = combine(acc[o], std::abs(row[o]) * wx[i], pin);
    }
    for (std::size_t o = 0; o < nw; ++o)
      if (kw[o]) total = combine(total, finish(acc[o], cin, pin) * ww[o], pout);
  } else {
    for (std::size_t i = 0; i < xg.size(); ++i) {
      if (!kx[i]) continue;
      const cplx* row = V.data() + i * nw;
      double acc = 0;
      for (std::size_t o = 0; o < nw; ++o)
        if (kw[o]) acc = combine(acc, std::abs(row[o]) * ww[o], pin);
      total = combine(total, finish(acc, cin, pin) * wx[i], pout);
    }
  }
  return finish(total, cout, pout);
}

double weighted_tail(const cvec& V, const BoxGrid& pg, const NormSpec& spec) {
  const int D = pg.rank() / 2;
  BoxGrid xg(std::vector<Axis>(pg.axes().begin(), pg.axes().begin() + D));
  BoxGrid wg(std::vector<Axis>(pg.axes().begin() + D, pg.axes().end()));
  const bool mod = spec.flavor == Flavor::modulation;
  const std::vector<double> wx = radial_weights(xg, mod ? spec.s : spec.t);
  const std::vector<double> ww = radial_weights(wg, mod ? spec.t : spec.s);
  auto edge_mask = [](const BoxGrid& g) {
    std::vector<char> e(g.size(), 0);
    std::vector<int> idx;
    for (std::size_t k = 0; k < g.size(); ++k) {
      g.unravel(k, idx);
      for (int i = 0; i < g.rank(); ++i)
        if (idx[i] == 0 || idx[i] == g.axis(i).n - 1) e[k] = 1;
    }
    return e;
  };
  const std::vector<char> ex = edge_mask(xg), ew = edge_mask(wg);
  const std::size_t nw = wg.size();
  double peak = 0, layer = 0;
  for (std::size_t i = 0; i < xg.size(); ++i) {
    const cplx* row = V.data() + i * nw;
    for (std::size_t o = 0; o < nw; ++o) {
      double v = std::abs(row[o]) * wx[i] * ww[o];
      peak = std::max(peak, v);
      if (ex[i] || ew[o]) layer = std::max(layer, v);
    }
  }
  return peak > 0 ? layer / peak : 0.0;
}

}  // namespace

NormEstimate box_norm(const cvec& f, const BoxGrid& g, const NormSpec& spec, const NormConfig& cfg) {
  if (spec.flavor == Flavor::fourier_l1) return fourier_l1(f, g, spec.s);
  check_exponent(spec.p);
  check_exponent(spec.q);
  if (spec.s < 0 || spec.t < 0) throw ConfigError("norm weights must be nonnegative");
  BoxGrid pg = norm_phase_grid(g, cfg.step);
  PhaseFunction V = stft_box(f, gaussian_on(g), g, pg);
  NormEstimate e;
  e.spec = spec;
  e.resolution = pg;
  e.value = mixed(V.samples, pg, spec, 1);
  e.coarse_value = mixed(V.samples, pg, spec, 2);
  e.converged = std::abs(e.value - e.coarse_value) <= 0.01 * e.value;
  e.sup_lower_bound = std::isinf(spec.p) || std::isinf(spec.q);
  e.tail_bound = weighted_tail(V.samples, pg, spec);
  if (cfg.tail_tol > 0 && e.tail_bound > cfg.tail_tol)
    throw TailError("phase grid does not cover the short-time Fourier transform", e.tail_bound);
  return e;
}

NormEstimate mod_norm(const Signal& f, const NormSpec& spec, const NormConfig& cfg) {
  NormSpec s = spec;
  if (s.flavor == Flavor::amalgam) s.flavor = Flavor::modulation;
  return box_norm(f.samples, f.grid.box(), s, cfg);
}

NormEstimate mod_norm(const PhaseFunction& F, const NormSpec& spec, const NormConfig& cfg) {
  NormSpec s = spec;
  if (s.flavor == Flavor::amalgam) s.flavor = Flavor::modulation;
  return box_norm(F.samples, F.grid, s, cfg);
}

NormEstimate amalgam_norm(const Signal& f, const NormSpec& spec, const NormConfig& cfg) {
  NormSpec s = spec;
  s.flavor = Flavor::amalgam;
  return box_norm(f.samples, f.grid.box(), s, cfg);
}

NormEstimate amalgam_norm(const PhaseFunction& F, const NormSpec& spec, const NormConfig& cfg) {
  NormSpec s = spec;
  s.flavor = Flavor::amalgam;
  return box_norm(F.samples, F.grid, s, cfg);
}

NormEstimate fourier_l1(const cvec& f, const BoxGrid& g, double s) {
  cvec F = fourier(f, g);
  NormEstimate e;
  e.spec = {1, 1, s, 0, Flavor::fourier_l1};
  e.resolution = g;
  double tot = 0, coarse = 0, peak = 0, layer = 0;
  std::vector<int> idx;
  std::vector<double> nu;
  for (std::size_t k = 0; k < F.size(); ++k) {
    g.frequency(k, nu);
    double r = 0;
    for (double v : nu) r += v * v;
    double v = std::abs(F[k]) * (s == 0 ? 1.0 : std::pow(1 + std::sqrt(r), s));
    tot += v;
    g.unravel(k, idx);
    bool even = true, edge = false;
    for (int i = 0; i < g.rank(); ++i) {
      even = even && ((idx[i] - g.axis(i).n / 2) % 2 == 0);
      edge = edge || idx[i] == 0 || idx[i] == g.axis(i).n - 1;
    }
    if (even) coarse += v;
    peak = std::max(peak, v);
    if (edge) layer = std::max(layer, v);
  }
  e.value = tot * g.freq_cell();
  e.coarse_value = coarse * g.freq_cell() * std::pow(2.0, g.rank());
  e.converged = std::abs(e.value - e.coarse_value) <= 0.01 * e.value;
  e.tail_bound = peak > 0 ? layer / peak : 0.0;
  return e;
}

double lp_norm(const cvec& f, const BoxGrid& g, double p) {
  check_exponent(p);
  double acc = 0;
  for (const auto& v : f) acc = std::isinf(p) ? std::max(acc, std::abs(v)) : acc + pw(std::abs(v), p);
  return std::isinf(p) ? acc : root(acc * g.cell(), p);
}

PointSet::PointSet(std::vector<PhasePoint> pts) : points(std::move(pts)) {
  for (const auto& p : points)
    if (p.d() != points.front().d()) throw DimensionError("point set mixes dimensions");
  rel = relative_separation(points);
}

PointSet PointSet::scaled(double alpha) const {
  std::vector<PhasePoint> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back(p * alpha);
  return PointSet(std::move(pts));
}

namespace {

// every integer vector in [-K, K]^D
void for_each_cell(int D, int K, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> k(D, -K);
  while (true) {
    fn(k);
    int i = D - 1;
    while (i >= 0 && k[i] == K) k[i--] = -K;
    if (i < 0) break;
    ++k[i];
  }
}

PhasePoint from_coords(int d, const std::vector<double>& c) {
  return PhasePoint(std::vector<double>(c.begin(), c.begin() + d), std::vector<double>(c.begin() + d, c.end()));
}

}  // namespace

PointSet PointSet::lattice(int d, double spacing, double T) {
  int K = static_cast<int>(std::floor(T / spacing + 1e-9));
  std::vector<PhasePoint> pts;
  for_each_cell(2 * d, K, [&](const std::vector<int>& k) {
    std::vector<double> c(k.begin(), k.end());
    for (auto& v : c) v *= spacing;
    pts.push_back(from_coords(d, c));
  });
  return PointSet(std::move(pts));
}

PointSet PointSet::jittered(int d, double jitter, double T, unsigned long long seed) {
  int K = static_cast<int>(std::floor(T + 1e-9));
  std::mt19937_64 rng(seed);
  // explicit mapping to [-1, 1) so point sets agree across standard libraries
  auto u = [&rng]() { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
  std::vector<PhasePoint> pts;
  for_each_cell(2 * d, K, [&](const std::vector<int>& k) {
    std::vector<double> c(k.begin(), k.end());
    for (auto& v : c) v += jitter * u();
    pts.push_back(from_coords(d, c));
  });
  return PointSet(std::move(pts));
}

PointSet PointSet::load_csv(const std::string& path) {
  auto rows = read_csv_numbers(path);
  std::vector<PhasePoint> pts;
  for (const auto& r : rows) {
    if (r.empty() || r.size() % 2) throw ConfigError("point rows need 2d columns: " + path);
    pts.push_back(from_coords(static_cast<int>(r.size() / 2), r));
  }
  return PointSet(std::move(pts));
}

namespace {

int max_in_cube(std::vector<std::vector<double>>& pts, int dim, int D) {
  if (pts.empty()) return 0;
  if (dim == D) return static_cast<int>(pts.size());
  std::sort(pts.begin(), pts.end(), [dim](const auto& a, const auto& b) { return a[dim] < b[dim]; });
  int best = 0;
  std::size_t hi = 0;
  // candidate cubes start at a point coordinate: [c, c + 1)
  for (std::size_t lo = 0; lo < pts.size(); ++lo) {
    if (lo > 0 && pts[lo][dim] == pts[lo - 1][dim]) continue;
    hi = std::max(hi, lo);
    while (hi < pts.size() && pts[hi][dim] < pts[lo][dim] + 1.0) ++hi;
    if (static_cast<int>(hi - lo) <= best) continue;
    std::vector<std::vector<double>> sub(pts.begin() + lo, pts.begin() + hi);
    best = std::max(best, max_in_cube(sub, dim + 1, D));
  }
  return best;
}

}  // namespace

int relative_separation(const std::vector<PhasePoint>& pts) {
  if (pts.empty()) return 0;
  const int d = pts.front().d();
  std::vector<std::vector<double>> c;
  c.reserve(pts.size());
  for (const auto& p : pts) {
    std::vector<double> v(p.x);
    v.insert(v.end(), p.w.begin(), p.w.end());
    c.push_back(std::move(v));
  }
  return max_in_cube(c, 0, 2 * d);
}

MeasureNorm measure_norm(const PointSet& pts, double step) {
  MeasureNorm out;
  out.rel = pts.rel;
  out.norm.spec = {kInf, kInf, 0, 0, Flavor::modulation};
  out.norm.sup_lower_bound = true;
  if (pts.size() == 0) {
    out.norm.converged = true;
    return out;
  }
  const int D = 2 * pts.d();
  // bump exp(-1/(1-|y|^2)) on the unit ball, L2-normalized by radial quadrature
  const int nr = 20000;
  double mass = 0;
  for (int i = 0; i < nr; ++i) {
    double r = (i + 0.5) / nr;
    double b = std::exp(-2.0 / (1 - r * r));
    mass += b * std::pow(r, D - 1) / nr;
  }
  double sphere = D == 2 ? 2 * kPi : (D == 4 ? 2 * kPi * kPi : 2 * std::pow(kPi, D / 2.0) / std::tgamma(D / 2.0));
  const double c = 1.0 / std::sqrt(mass * sphere);
  auto bump = [c](double r2) { return r2 < 1 ? c * std::exp(-1.0 / (1 - r2)) : 0.0; };

  std::vector<double> lo(D, 1e300), hi(D, -1e300);
  std::map<std::vector<int>, std::vector<std::vector<double>>> cells;
  for (const auto& p : pts.points) {
    std::vector<double> v(p.x);
    v.insert(v.end(), p.w.begin(), p.w.end());
    std::vector<int> key(D);
    for (int i = 0; i < D; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
      key[i] = static_cast<int>(std::floor(v[i]));
    }
    cells[key].push_back(v);
  }
  std::vector<int> counts(D);
  std::size_t total = 1;
  for (int i = 0; i < D; ++i) {
    counts[i] = static_cast<int>(std::ceil((hi[i] - lo[i] + 2) / step)) + 1;
    total *= counts[i];
  }
  double best = 0, best_coarse = 0;
  std::vector<double> x(D);
  std::vector<int> key(D);
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t r = f;
    bool even = true;
    for (int i = D - 1; i >= 0; --i) {
      int j = static_cast<int>(r % counts[i]);
      r /= counts[i];
      x[i] = lo[i] - 1 + j * step;
      even = even && j % 2 == 0;
    }
    double s = 0;
    for_each_cell(D, 1, [&](const std::vector<int>& off) {
      for (int i = 0; i < D; ++i) key[i] = static_cast<int>(std::floor(x[i])) + off[i];
      auto it = cells.find(key);
      if (it == cells.end()) return;
      for (const auto& v : it->second) {
        double r2 = 0;
        for (int i = 0; i < D; ++i) r2 += (v[i] - x[i]) * (v[i] - x[i]);
        s += bump(r2);
      }
    });
    best = std::max(best, s);
    if (even) best_coarse = std::max(best_coarse, s);
  }
  out.norm.value = best;
  out.norm.coarse_value = best_coarse;
  out.norm.converged = std::abs(best - best_coarse) <= 0.01 * best;
  return out;
}

}  // namespace edgewise
