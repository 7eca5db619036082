#include "cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "cli/svg.hpp"
#include "edgewise/errors.hpp"
#include "edgewise/io.hpp"

namespace edgewise::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// Runs body(i) for i in [0, n) on up to `threads` workers; results go by index.
template <class F>
void parallel_for(std::size_t n, int threads, F body) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
  };
  int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

std::string slope_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

}  // namespace

OracleCache::OracleCache() {
  if (const char* d = std::getenv("EDGEWISE_CACHE")) dir_ = d;
}

std::optional<std::string> OracleCache::load(const std::string& key) {
  if (!enabled()) return std::nullopt;
  std::lock_guard<std::mutex> lk(mu_);
  fs::path p = fs::path(dir_) / (hex(fnv1a(key)) + ".json");
  std::ifstream in(p);
  if (in) {
    try {
      ojson j = ojson::parse(in);
      if (j.at("key") == key) {
        ++hits_;
        return j.at("value").dump();
      }
    } catch (const std::exception&) {
      // unreadable entry: recompute and overwrite
    }
  }
  ++misses_;
  return std::nullopt;
}

void OracleCache::store(const std::string& key, const std::string& value) {
  if (!enabled()) return;
  std::lock_guard<std::mutex> lk(mu_);
  std::error_code ec;
  fs::create_directories(dir_, ec);
  fs::path p = fs::path(dir_) / (hex(fnv1a(key)) + ".json");
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;  // a read-only cache only costs time
    ojson j;
    j["key"] = key;
    j["value"] = ojson::parse(value);
    out << j.dump();
  }
  fs::rename(tmp, p, ec);
}

std::optional<BandSpectrum> OracleCache::bloch(const FourierSymbol& sym, const std::string& sym_json,
                                               const FluxRational& f, int m) {
  const std::string key = "bloch/1;" + sym_json + ";" + std::to_string(f.p) + "/" + std::to_string(f.q) +
                          ";m=" + std::to_string(m) + ";" + EDGEWISE_VERSION;
  if (auto hit = load(key)) {
    ojson v = ojson::parse(*hit);
    BandSpectrum b;
    b.flux = FluxRational(f.p, f.q);
    b.flux.target = f.target;
    b.flux.residual = f.residual;
    b.m = m;
    b.q = v.at("q");
    b.merge_tol = v.at("merge_tol");
    b.max_hermitian_defect = v.at("hermitian_defect");
    b.refined = v.at("refined");
    std::vector<Band> bands;
    for (const auto& x : v.at("bands")) bands.push_back({x[0].get<double>(), x[1].get<double>()});
    b.spectrum = Spectrum::from_bands(bands, v.at("eta").get<double>());
    return b;
  }
  if (!enabled()) return std::nullopt;
  BandSpectrum b = harper_spectrum(sym, f, m);
  ojson v;
  v["q"] = b.q;
  v["merge_tol"] = b.merge_tol;
  v["hermitian_defect"] = b.max_hermitian_defect;
  v["refined"] = b.refined;
  v["eta"] = b.spectrum.eta();
  ojson bl = ojson::array();
  for (const auto& x : b.spectrum.bands()) bl.push_back({x.lo, x.hi});
  v["bands"] = bl;
  store(key, v.dump());
  return b;
}

std::optional<FrameBounds> OracleCache::zak(const Signal& g, const std::string& window, double alpha, long qmax) {
  std::ostringstream k;
  k.precision(17);
  k << "zak/1;" << window << ";n=" << g.grid.n << ";len=" << g.grid.len << ";alpha=" << alpha << ";qmax=" << qmax
    << ";" << EDGEWISE_VERSION;
  const std::string key = k.str();
  if (auto hit = load(key)) {
    ojson v = ojson::parse(*hit);
    FrameBounds b;
    b.method = "zak";
    b.lower = v.at("lower");
    b.upper = v.at("upper");
    b.p = v.at("p");
    b.q = v.at("q");
    b.rational_error = v.at("rational_error");
    b.evaluations = v.at("evaluations");
    return b;
  }
  if (!enabled()) return std::nullopt;
  ZakConfig zc;
  zc.qmax = qmax;
  FrameBounds b = frame_bounds_zak(g, alpha, alpha, zc);
  ojson v;
  v["lower"] = b.lower;
  v["upper"] = b.upper;
  v["p"] = b.p;
  v["q"] = b.q;
  v["rational_error"] = b.rational_error;
  v["evaluations"] = b.evaluations;
  store(key, v.dump());
  return b;
}

std::string RunRecord::to_json() const {
  ojson j;
  j["schema"] = schema;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["library_version"] = library_version;
  j["config"] = ojson::parse(config.empty() ? "null" : config);
  j["summary"] = ojson::parse(summary.empty() ? "null" : summary);
  j["wall_seconds"] = {{"compute", wall_compute}, {"write", wall_write}, {"total", wall_total}};
  j["outputs"] = outputs;
  j["failures"] = failures;
  j["cache"] = {{"hits", cache_hits}, {"misses", cache_misses}};
  return j.dump(2);
}

RunRecord RunRecord::from_json(const std::string& text) {
  RunRecord r;
  try {
    ojson j = ojson::parse(text);
    r.schema = j.at("schema");
    r.kind = j.at("kind");
    r.config_hash = j.at("config_hash");
    r.library_version = j.at("library_version");
    r.config = j.at("config").is_null() ? "" : j.at("config").dump();
    r.summary = j.at("summary").is_null() ? "" : j.at("summary").dump();
    r.wall_compute = j.at("wall_seconds").at("compute");
    r.wall_write = j.at("wall_seconds").at("write");
    r.wall_total = j.at("wall_seconds").at("total");
    r.outputs = j.at("outputs").get<std::vector<std::string>>();
    r.failures = j.at("failures").get<std::vector<std::string>>();
    r.cache_hits = j.at("cache").at("hits");
    r.cache_misses = j.at("cache").at("misses");
  } catch (const ojson::exception& e) {
    throw ConfigError(std::string("run record: ") + e.what());
  }
  return r;
}

namespace {

struct Artifacts {
  std::string dir;
  std::vector<std::string> files;
  std::string path(const std::string& name) {
    files.push_back(name);
    return (fs::path(dir) / name).string();
  }
};

std::string alpha_run(const RunConfig& cfg, Artifacts& art, OracleCache& cache, std::vector<std::string>& failures,
                      double& t_compute) {
  auto t0 = std::chrono::steady_clock::now();
  Signal g = make_window(parse_window(cfg.window), section_grid(cfg.T));
  const double amin = *std::min_element(cfg.alphas.begin(), cfg.alphas.end());
  PointSet pts;
  if (cfg.points == "lattice") pts = PointSet::lattice(1, 1.0, cfg.T / amin + 1);
  else if (cfg.points == "jittered") pts = PointSet::jittered(1, cfg.jitter, cfg.T / amin + 1, cfg.seed);
  else pts = PointSet::load_csv(cfg.points_path);

  SweepConfig sc;
  sc.section.T = cfg.T;
  sc.section.step = cfg.section_step;
  sc.section.cutoff = cfg.cutoff;
  sc.alpha0 = cfg.alpha0;
  sc.fit_from = cfg.fit_from;
  sc.threads = cfg.threads;
  SweepResult r = sweep_alpha(g, pts, cfg.alphas, sc);
  failures.insert(failures.end(), r.failures.begin(), r.failures.end());

  const std::size_t n = cfg.alphas.size();
  std::vector<FrameBounds> zak(n);
  std::vector<std::string> zak_fail(n);
  if (cfg.zak_oracle) {
    Signal small = make_window(parse_window(cfg.window), GridSpec(1, 256, 16));
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      try {
        auto z = cache.zak(small, cfg.window, cfg.alphas[i], cfg.zak_qmax);
        if (z) {
          zak[i] = *z;
        } else {
          ZakConfig zc;
          zc.qmax = cfg.zak_qmax;
          zak[i] = frame_bounds_zak(small, cfg.alphas[i], cfg.alphas[i], zc);
        }
      } catch (const Error& e) {
        zak_fail[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < n; ++i)
      if (!zak_fail[i].empty()) failures.push_back("zak at alpha " + fmt_num(cfg.alphas[i]) + ": " + zak_fail[i]);
  }
  t_compute = since(t0);

  // per-alpha rows
  std::vector<std::string> head = {"alpha", "delta", "lower", "upper", "n_gaps", "rank", "n_points"};
  if (cfg.zak_oracle) head.insert(head.end(), {"zak_lower", "zak_upper", "zak_p", "zak_q"});
  std::vector<std::vector<double>> rows;
  double zak_dev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = r.records[i];
    bool ok = rec.failure.empty();
    std::vector<double> row = {rec.alpha, rec.delta, ok ? rec.bounds.lower : NAN, ok ? rec.bounds.upper : NAN,
                               double(rec.gaps.gaps.size()), double(rec.bounds.rank), double(rec.bounds.n_points)};
    if (cfg.zak_oracle) {
      bool zok = zak_fail[i].empty();
      row.insert(row.end(), {zok ? zak[i].lower : NAN, zok ? zak[i].upper : NAN, double(zak[i].p), double(zak[i].q)});
      if (ok && zok)
        zak_dev = std::max({zak_dev, std::abs(rec.bounds.lower / zak[i].lower - 1),
                            std::abs(rec.bounds.upper / zak[i].upper - 1)});
    }
    rows.push_back(row);
  }
  write_csv_rows(art.path("alpha_sweep.csv"), head, rows);

  std::vector<std::vector<double>> qrows;
  {
    std::size_t k = 0;
    int prev = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.records[i].failure.empty()) continue;
      if (prev >= 0 && k < r.lower_quotients.size()) {
        qrows.push_back({r.records[prev].alpha, r.records[i].alpha, r.lower_quotients[k], r.upper_quotients[k]});
        ++k;
      }
      prev = static_cast<int>(i);
    }
  }
  write_csv_rows(art.path("quotients.csv"), {"alpha_left", "alpha_right", "lower_quotient", "upper_quotient"}, qrows);

  Plot edges;
  edges.title = "Frame bounds against alpha";
  edges.xlabel = "alpha";
  edges.ylabel = "frame bound";
  Series lo{"lower A", {}, {}, true}, hi{"upper B", {}, {}, true};
  for (const auto& row : rows) lo.x.push_back(row[0]), lo.y.push_back(row[2]), hi.x.push_back(row[0]), hi.y.push_back(row[3]);
  edges.series = {lo, hi};
  if (cfg.zak_oracle) {
    Series zl{"Zak lower", {}, {}, false, true}, zu{"Zak upper", {}, {}, false, true};
    for (const auto& row : rows) zl.x.push_back(row[0]), zl.y.push_back(row[7]), zu.x.push_back(row[0]), zu.y.push_back(row[8]);
    edges.series.push_back(zl);
    edges.series.push_back(zu);
  }
  write_svg(art.path("edges_vs_alpha.svg"), edges);

  Plot ll;
  ll.title = "Lower frame bound near critical density";
  ll.xlabel = "1 - alpha";
  ll.ylabel = "A";
  ll.logx = ll.logy = true;
  Series pts_s{"A(alpha)", {}, {}, true}, fit{"fit, slope " + slope_label(r.fit_slope), {}, {}, false, true};
  for (const auto& row : rows)
    if (row[0] < 1) pts_s.x.push_back(1 - row[0]), pts_s.y.push_back(row[2]);
  for (const auto& row : rows)
    if (row[0] >= cfg.fit_from && row[0] < 1 && r.fit_points >= 2)
      fit.x.push_back(1 - row[0]), fit.y.push_back(r.fit_const * std::pow(1 - row[0], r.fit_slope));
  ll.series = {pts_s, fit};
  write_svg(art.path("lower_bound_loglog.svg"), ll);

  ojson s;
  s["kind"] = "alpha";
  s["points"] = r.alphas.size();
  s["max_quotient"] = num(r.max_quotient);
  s["rel"] = r.rel;
  s["window_m1_2"] = num(r.window_m1_2);
  s["rhs"] = num(r.rhs);
  s["c_hat"] = num(r.c_hat);
  s["fit"] = {{"slope", num(r.fit_slope)}, {"c", num(r.fit_const)}, {"points", r.fit_points}, {"from", cfg.fit_from}};
  if (cfg.zak_oracle) s["zak_max_relative_deviation"] = num(zak_dev);
  s["sweep_hash"] = r.config_hash;
  return s.dump(2);
}

std::string band_run(const RunConfig& cfg, Artifacts& art, OracleCache& cache, std::vector<std::string>& failures,
                     double& t_compute) {
  auto t0 = std::chrono::steady_clock::now();
  FourierSymbol sym = resolve_symbol(cfg.symbol);
  // sorted by value, first occurrence of each value kept; delta targets travel along
  std::vector<std::size_t> order(cfg.fluxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.fluxes[a].value() < cfg.fluxes[b].value(); });
  std::vector<std::size_t> keep;
  for (std::size_t i : order)
    if (keep.empty() || cfg.fluxes[i].value() > cfg.fluxes[keep.back()].value()) keep.push_back(i);

  const std::size_t n = keep.size();
  std::vector<std::optional<BandSpectrum>> specs(n);
  std::vector<std::string> fail(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const FluxRational& f = cfg.fluxes[keep[i]];
    try {
      specs[i] = cache.bloch(sym, cfg.symbol, f, cfg.bloch_m);
      if (!specs[i]) specs[i] = harper_spectrum(sym, f, cfg.bloch_m);
    } catch (const Error& e) {
      fail[i] = e.what();
    }
  });
  std::vector<double> params;
  std::vector<Spectrum> sp;
  std::vector<BandSpectrum> good;
  std::vector<std::size_t> src;
  for (std::size_t i = 0; i < n; ++i) {
    const FluxRational& f = cfg.fluxes[keep[i]];
    if (!fail[i].empty()) {
      failures.push_back(std::to_string(f.p) + "/" + std::to_string(f.q) + ": " + fail[i]);
      continue;
    }
    params.push_back(f.value());
    sp.push_back(specs[i]->spectrum);
    good.push_back(*specs[i]);
    src.push_back(keep[i]);
  }
  EdgeTrack track;
  LipschitzReport rep;
  double bell = NAN;
  if (!params.empty()) track = track_edges(params, sp);
  if (params.size() >= 3) rep = lipschitz_fit(track);
  if (params.size() >= 2 || sym.dcoeff) {
    std::vector<double> deltas;
    for (double v : params) deltas.push_back(v - 1);
    try {
      bell = check_bellissard_condition(sym, deltas, 0.1, false).condition;
    } catch (const Error& e) {
      failures.push_back(std::string("bellissard condition: ") + e.what());
    }
  }
  t_compute = since(t0);

  write_bands_csv(art.path("butterfly.csv"), good);

  const bool is_delta = cfg.kind == "delta";
  std::vector<std::string> head = {"flux", "p", "q"};
  if (is_delta) head.insert(head.end(), {"delta_target", "delta", "rational_residual"});
  head.insert(head.end(), {"lower", "upper", "intervals"});
  for (const auto& nm : track.names) head.push_back("track_" + nm);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < good.size(); ++i) {
    const FluxRational& f = good[i].flux;
    const Spectrum& sp_i = good[i].spectrum;
    std::vector<double> row;
    if (is_delta) row = {f.value(), double(f.p), double(f.q), cfg.deltas[src[i]], f.delta(), f.residual,
                         sp_i.lower(), sp_i.upper(), double(sp_i.bands().size())};
    else row = {f.value(), double(f.p), double(f.q), sp_i.lower(), sp_i.upper(), double(sp_i.bands().size())};
    for (const auto& s : track.series) row.push_back(s[i]);
    rows.push_back(row);
  }
  write_csv_rows(art.path("edges.csv"), head, rows);

  Plot bf;
  bf.title = "Spectrum against flux";
  bf.xlabel = "energy";
  bf.ylabel = "flux p/q";
  for (const auto& b : good)
    for (const auto& band : b.spectrum.bands()) bf.segments.push_back({band.lo, band.hi, b.flux.value()});
  write_svg(art.path("butterfly.svg"), bf);

  Plot ed;
  ed.title = "Tracked edges";
  ed.xlabel = is_delta ? "delta" : "flux p/q";
  ed.ylabel = "energy";
  for (std::size_t k = 0; k < track.series.size() && k < 8; ++k) {
    Series s{track.names[k], {}, {}, true};
    for (std::size_t i = 0; i < track.params.size(); ++i)
      s.x.push_back(is_delta ? track.params[i] - 1 : track.params[i]), s.y.push_back(track.series[k][i]);
    ed.series.push_back(s);
  }
  write_svg(art.path(is_delta ? "edges_vs_delta.svg" : "edges_vs_flux.svg"), ed);

  ojson s;
  s["kind"] = cfg.kind;
  s["symbol"] = sym.name;
  s["points"] = good.size();
  s["max_quotient"] = num(rep.max_quotient);
  s["median_quotient"] = num(rep.median_quotient);
  s["coarse_max_quotient"] = num(rep.coarse_max);
  s["refinement_stable"] = rep.stable;
  ojson per = ojson::array();
  for (std::size_t k = 0; k < rep.per_series.size(); ++k) per.push_back({{"series", track.names[k]}, {"max_quotient", num(rep.per_series[k])}});
  s["per_series"] = per;
  s["bellissard_condition"] = num(bell);
  s["symbol_l1"] = num(good.empty() ? NAN : sym.l1(good.front().flux.delta()));
  ojson iv = ojson::array();
  for (const auto& b : good) iv.push_back({{"p", b.flux.p}, {"q", b.flux.q}, {"intervals", b.spectrum.bands().size()}});
  s["intervals"] = iv;
  return s.dump(2);
}

}  // namespace

RunRecord run_sweep(const RunConfig& cfg, const std::string& out_dir, OracleCache& cache) {
  auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) throw ConfigError("cannot create output directory " + out_dir);
  RunRecord rec;
  rec.kind = cfg.kind;
  rec.config = cfg.canonical();
  rec.config_hash = cfg.hash();
  rec.library_version = EDGEWISE_VERSION;
  int h0 = cache.hits(), m0 = cache.misses();

  Artifacts art{out_dir, {}};
  double t_compute = 0;
  try {
    rec.summary = cfg.kind == "alpha" ? alpha_run(cfg, art, cache, rec.failures, t_compute)
                                      : band_run(cfg, art, cache, rec.failures, t_compute);
  } catch (const Error& e) {
    rec.failures.push_back(e.what());
    rec.summary = ojson{{"kind", cfg.kind}, {"error", e.what()}}.dump(2);
  }
  write_text(art.path("summary.json"), rec.summary + "\n");
  rec.outputs = art.files;
  rec.outputs.push_back("run.json");
  rec.cache_hits = cache.hits() - h0;
  rec.cache_misses = cache.misses() - m0;
  rec.wall_compute = t_compute;
  rec.wall_total = since(t0);
  rec.wall_write = std::max(0.0, rec.wall_total - t_compute);
  write_text((fs::path(out_dir) / "run.json").string(), rec.to_json() + "\n");
  return rec;
}

}  // namespace edgewise::cli
