#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/svg.hpp"
#include "cli/sweep.hpp"
#include "edgewise/errors.hpp"

using namespace edgewise;
using namespace edgewise::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("edgewise_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kFlux5 = R"({"version": 1, "kind": "flux", "flux": {"farey_order": 5}, "bloch_m": 32})";

int run_args(std::vector<const char*> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "edgewise");
  std::ostringstream out, err;
  int rc = run(static_cast<int>(args.size()), args.data(), out, err);
  if (out_text) *out_text = out.str();
  return rc;
}

}  // namespace

TEST_CASE("config accepts the documented kinds") {
  RunConfig a = parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"from": 0.8, "to": 0.9, "count": 3}})");
  CHECK(a.alphas.size() == 3);
  CHECK(a.alphas[1] == doctest::Approx(0.85));
  CHECK(a.points == "lattice");

  RunConfig f = parse_config(kFlux5);
  // 1/5 1/4 1/3 2/5 1/2 3/5 2/3 3/4 4/5 1/1
  CHECK(f.fluxes.size() == 10);

  RunConfig v = parse_config(R"({"version": 1, "kind": "flux", "flux": {"values": [[1, 3], [2, 4]]}})");
  REQUIRE(v.fluxes.size() == 2);
  CHECK(v.fluxes[1].p == 1);  // reduced
  CHECK(v.fluxes[1].q == 2);

  RunConfig d = parse_config(
      R"({"version": 1, "kind": "delta", "symbol": {"builtin": "gaussian_lattice", "K": 3}, "delta": {"values": [0.25, 0.5]}})");
  REQUIRE(d.fluxes.size() == 2);
  CHECK(d.fluxes[0].value() == doctest::Approx(1.25));
  CHECK(resolve_symbol(d.symbol).K == 3);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "flux", "flux": {"farey_order": 5}, "colour": 1})"), ConfigError);
  // a key that belongs to another kind
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "flux", "flux": {"farey_order": 5}, "window": "gaussian"})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"values": [0.9]}, "section": {"T": 8, "n": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"kind": "flux", "flux": {"farey_order": 5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 2, "kind": "flux", "flux": {"farey_order": 5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "gabor"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"values": [-0.5]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"from": 0.9, "to": 0.8, "count": 3}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"values": [0.9]}, "points": {"kind": "jittered", "jitter": 0.7}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"values": [0.9]},
                                   "points": {"kind": "jittered", "jitter": 0.1}, "zak_oracle": true})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"values": [0.9]}, "window": "sinc"})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "flux", "flux": {"values": [[1, 0]]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "kind": "flux", "flux": {"farey_order": 5}, "symbol": {"builtin": "x"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("config hash ignores threads and tracks everything else") {
  RunConfig a = parse_config(kFlux5);
  RunConfig b = parse_config(R"({"version": 1, "kind": "flux", "flux": {"farey_order": 5}, "bloch_m": 32, "threads": 4})");
  RunConfig c = parse_config(R"({"version": 1, "kind": "flux", "flux": {"farey_order": 5}, "bloch_m": 48})");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  RunConfig s = a;
  s.seed = 7;
  CHECK(a.hash() != s.hash());
}

TEST_CASE("run record round-trips through JSON") {
  RunRecord r;
  r.kind = "flux";
  r.config_hash = "abc123";
  r.library_version = "9.9.9";
  r.config = R"({"version":1,"kind":"flux"})";
  r.summary = R"({"max_quotient":1.2345678901234567,"points":3})";
  r.wall_compute = 0.125;
  r.wall_write = 1.0 / 3.0;
  r.wall_total = 0.1 + 0.2;
  r.outputs = {"edges.csv", "run.json"};
  r.failures = {"1/2: something"};
  r.cache_hits = 2;
  r.cache_misses = 5;
  RunRecord back = RunRecord::from_json(r.to_json());
  CHECK(back == r);
  CHECK(RunRecord::from_json(back.to_json()).to_json() == r.to_json());
  CHECK_THROWS_AS(RunRecord::from_json(R"({"schema": 1})"), ConfigError);
}

TEST_CASE("flux sweep at Farey order 8 gives q intervals for odd q and q - 1 for even q") {
  // For rational flux p/q the Harper spectrum has q bands, all gaps open except the
  // central one for even q, where two bands touch at zero.
  fs::path dir = scratch("farey8");
  RunConfig cfg = parse_config(R"({"version": 1, "kind": "flux", "flux": {"farey_order": 8}})");
  OracleCache off("");
  RunRecord rec = run_sweep(cfg, dir.string(), off);
  CHECK(rec.failures.empty());
  auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  REQUIRE(summary["intervals"].size() == cfg.fluxes.size());
  for (const auto& e : summary["intervals"]) {
    long q = e["q"], n = e["intervals"];
    CHECK_MESSAGE(n == (q % 2 ? q : q - 1), "p/q = " << e["p"] << "/" << q);
  }
  // butterfly rows = total interval count
  std::size_t rows = 0, want = 0;
  std::ifstream in(dir / "butterfly.csv");
  for (std::string line; std::getline(in, line);) ++rows;
  for (const auto& e : summary["intervals"]) want += e["intervals"].get<std::size_t>();
  CHECK(rows == want + 1);
  for (const char* f : {"butterfly.csv", "edges.csv", "summary.json", "butterfly.svg", "edges_vs_flux.svg", "run.json"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  CHECK(RunRecord::from_json(slurp(dir / "run.json")).config_hash == cfg.hash());
}

TEST_CASE("identical configs give identical artifacts, with and without the cache") {
  RunConfig cfg = parse_config(kFlux5);
  fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c"), d = scratch("det_d");
  fs::path cache_dir = scratch("cache");
  OracleCache off("");
  run_sweep(cfg, a.string(), off);
  cfg.threads = 3;
  run_sweep(cfg, b.string(), off);
  OracleCache on(cache_dir.string());
  RunRecord cold = run_sweep(cfg, c.string(), on);
  RunRecord warm = run_sweep(cfg, d.string(), on);
  CHECK(cold.cache_misses == static_cast<int>(cfg.fluxes.size()));
  CHECK(cold.cache_hits == 0);
  CHECK(warm.cache_hits == static_cast<int>(cfg.fluxes.size()));
  CHECK(warm.cache_misses == 0);
  for (const char* f : {"butterfly.csv", "edges.csv", "summary.json", "butterfly.svg", "edges_vs_flux.svg"}) {
    std::string ref = slurp(a / f);
    CHECK(!ref.empty());
    CHECK_MESSAGE(slurp(b / f) == ref, f);
    CHECK_MESSAGE(slurp(c / f) == ref, f);
    CHECK_MESSAGE(slurp(d / f) == ref, f);
  }
}

TEST_CASE("small alpha sweep writes rows, quotients and the Zak columns") {
  fs::path dir = scratch("alpha"), dir2 = scratch("alpha2"), cache_dir = scratch("alpha_cache");
  RunConfig cfg = parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"values": [0.85, 0.9, 0.95]},
                                   "section": {"T": 6}, "zak_oracle": true})");
  OracleCache on(cache_dir.string());
  RunRecord rec = run_sweep(cfg, dir.string(), on);
  CHECK(rec.failures.empty());
  CHECK(rec.cache_misses == 3);
  std::ifstream in(dir / "alpha_sweep.csv");
  std::string head;
  std::getline(in, head);
  CHECK(head == "alpha,delta,lower,upper,n_gaps,rank,n_points,zak_lower,zak_upper,zak_p,zak_q");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 3);
  auto s = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(s["max_quotient"].get<double>() > 0);
  CHECK(s["c_hat"].get<double>() > 0);
  for (const char* f : {"quotients.csv", "edges_vs_alpha.svg", "lower_bound_loglog.svg"}) CHECK(fs::exists(dir / f));

  RunRecord again = run_sweep(cfg, dir2.string(), on);
  CHECK(again.cache_hits == 3);
  CHECK(slurp(dir2 / "alpha_sweep.csv") == slurp(dir / "alpha_sweep.csv"));
}

TEST_CASE("a failing sweep still writes its artifacts") {
  fs::path dir = scratch("partial");
  RunConfig cfg = parse_config(R"({"version": 1, "kind": "alpha", "alpha": {"values": [0.9]},
                                   "points": {"kind": "csv", "path": "/nonexistent/points.csv"}})");
  OracleCache off("");
  RunRecord rec = run_sweep(cfg, dir.string(), off);
  CHECK(!rec.failures.empty());
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "run.json"));
  CHECK(RunRecord::from_json(slurp(dir / "run.json")).failures == rec.failures);
}

TEST_CASE("svg output is deterministic and well formed") {
  Plot p;
  p.title = "a < b & c";
  p.logy = true;
  p.series.push_back({"s", {1, 2, 3}, {1e-3, 1e-2, 0}, true});  // the zero breaks the log line
  p.segments.push_back({0, 1, 2});
  std::string a = p.render(), b = p.render();
  CHECK(a == b);
  CHECK(a.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(a.rfind("</svg>\n") == a.size() - 7);
}

TEST_CASE("verify command: usage errors, passing suite, tightened failure") {
  std::string out;
  CHECK(run_args({"verify", "--suite", ""}) == kUsage);
  CHECK(run_args({"verify", "--suite", "nonsense"}) == kUsage);
  CHECK(run_args({"verify"}) == kUsage);
  CHECK(run_args({}) == kUsage);

  CHECK(run_args({"verify", "--suite", "spectra"}, &out) == kOk);
  auto ok = nlohmann::json::parse(out);
  CHECK(ok["pass"] == true);
  CHECK(ok["suite"] == "spectra");
  CHECK(ok["failures"].empty());

  // tolerances tightened far past what any measurement reaches
  CHECK(run_args({"verify", "--suite", "spectra", "--tighten=1e20"}, &out) == kFailed);
  auto bad = nlohmann::json::parse(out);
  CHECK(bad["pass"] == false);
  CHECK(!bad["failures"].empty());
  CHECK(bad["tighten"].get<double>() == 1e20);
}

TEST_CASE("sweep command validates its inputs") {
  fs::path dir = scratch("cmd");
  std::ofstream(dir / "bad.json") << R"({"version": 1, "kind": "flux", "flux": {"farey_order": 3}, "extra": 0})";
  std::ofstream(dir / "good.json") << R"({"version": 1, "kind": "flux", "flux": {"farey_order": 3}})";
  std::string cfg_bad = (dir / "bad.json").string(), cfg_good = (dir / "good.json").string(),
              out = (dir / "out").string();
  CHECK(run_args({"sweep", "--config", cfg_bad.c_str(), "--out", out.c_str()}) == kUsage);
  CHECK(run_args({"sweep", "--config", "/nonexistent.json", "--out", out.c_str()}) == kUsage);
  CHECK(run_args({"sweep", "--config", cfg_good.c_str()}) == kUsage);
  std::string text;
  CHECK(run_args({"sweep", "--config", cfg_good.c_str(), "--out", out.c_str(), "--threads", "2"}, &text) == kOk);
  CHECK(RunRecord::from_json(text).kind == "flux");
  CHECK(fs::exists(fs::path(out) / "edges.csv"));
}
