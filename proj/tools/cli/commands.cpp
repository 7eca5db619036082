#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cli/config.hpp"
#include "cli/sweep.hpp"
#include "edgewise/errors.hpp"
#include "verify/verify.hpp"

namespace edgewise::cli {

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  if (a.suite.empty()) {
    err << "usage: edgewise verify --suite NAME (one of";
    for (const auto& s : verify::suite_names()) err << " " << s;
    err << " all)\n";
    return kUsage;
  }
  if (!(a.tighten > 0)) {
    err << "--tighten must be positive\n";
    return kUsage;
  }
  verify::Options opt;
  opt.tighten = a.tighten;
  opt.threads = a.threads;
  if (a.seed) opt.seed = *a.seed;
  verify::Checks checks;
  try {
    checks = verify::run_suite(a.suite, opt);
  } catch (const PreconditionError& e) {
    err << e.what() << "\n";
    return kUsage;
  }
  const std::string report = verify::report_json(checks, a.suite, opt);
  out << report << "\n";
  if (!a.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    std::ofstream f(std::filesystem::path(a.out_dir) / ("verify-" + a.suite + ".json"), std::ios::binary);
    if (!f) {
      err << "cannot write report into " << a.out_dir << "\n";
      return kError;
    }
    f << report << "\n";
  }
  for (const auto& c : checks)
    if (!c.pass) err << "FAIL " << c.suite << "/" << c.name << ": " << c.value << " > " << c.tol / a.tighten << "\n";
  return verify::all_pass(checks) ? kOk : kFailed;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(a.config_path);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kUsage;
  }
  if (a.threads) {
    if (*a.threads < 1) {
      err << "--threads must be at least 1\n";
      return kUsage;
    }
    cfg.threads = *a.threads;
  }
  if (a.seed) cfg.seed = *a.seed;
  OracleCache cache;
  RunRecord rec;
  try {
    rec = run_sweep(cfg, a.out_dir, cache);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kError;
  }
  out << rec.to_json() << "\n";
  for (const auto& f : rec.failures) err << "failure: " << f << "\n";
  return rec.failures.empty() ? kOk : kFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge regularity experiments: verification suites and parameter sweeps", "edgewise"};
  app.set_version_flag("--version", EDGEWISE_VERSION);
  app.require_subcommand(1);

  VerifyArgs va;
  unsigned long long vseed = 0;
  auto* v = app.add_subcommand("verify", "run a verification suite and print a JSON report");
  v->add_option("--suite", va.suite, "tfcore, modnorm, weyl, gabor, spectra, harper or all")->required();
  v->add_flag("--tighten{10}", va.tighten, "divide every tolerance by this factor (10 when given bare)");
  v->add_option("--out", va.out_dir, "also write the report into this directory");
  auto* vs = v->add_option("--seed", vseed, "seed for random corpora");
  v->add_option("--threads", va.threads, "worker threads")->check(CLI::PositiveNumber);

  SweepArgs sa;
  int sthreads = 1;
  unsigned long long sseed = 0;
  auto* s = app.add_subcommand("sweep", "run an alpha, flux or delta sweep from a JSON config");
  s->add_option("--config", sa.config_path, "config file")->required();
  s->add_option("--out", sa.out_dir, "output directory")->required();
  auto* st = s->add_option("--threads", sthreads, "worker threads, overrides the config");
  auto* ss = s->add_option("--seed", sseed, "seed, overrides the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }
  if (v->parsed()) {
    if (vs->count()) va.seed = vseed;
    return cmd_verify(va, out, err);
  }
  if (st->count()) sa.threads = sthreads;
  if (ss->count()) sa.seed = sseed;
  return cmd_sweep(sa, out, err);
}

}  // namespace edgewise::cli
