// Acceptance run: criteria 1..9, one PASS/FAIL line each. A criterion passes when
// every check in its group passes and the group finishes inside its time budget.
// The full check list goes to acceptance_report.json in the working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <string>

#include "verify/verify.hpp"

using namespace edgewise::verify;

namespace {

struct Criterion {
  int id;
  const char* title;
  Checks (*run)(const Options&);
  double budget;  // seconds
};

const Criterion kCriteria[] = {
    {1, "time-frequency identities", tf_identities, 60},
    {2, "rho(z) from rank-one projections", tf_multiplier, 30},
    {3, "Weyl algebra", weyl_algebra, 120},
    {4, "truncation law", truncation_law, 120},
    {5, "heat-flow law", heat_flow_law, 60},
    {6, "finite section vs Zak", frame_oracle, 300},
    {7, "alpha sweeps and critical fit", alpha_sweeps, 1800},
    {8, "Harper edges and gaps", harper_edges, 600},
    {9, "norm inequality corpus", norm_corpus, 600},
};

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  int only = 0;  // run a single criterion: acceptance N
  if (argc > 1) only = std::atoi(argv[1]);

  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (only && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Checks checks;
    std::string error;
    try {
      checks = c.run(opt);
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.budget;
    bool ok = error.empty() && !checks.empty() && all_pass(checks) && in_time;
    if (!ok) ++failed;

    std::string why;
    for (const auto& k : checks)
      if (!k.pass) why += (why.empty() ? "" : ", ") + k.name;
    if (!error.empty()) why = "error: " + error;
    if (!in_time) why += std::string(why.empty() ? "" : "; ") + "over budget";
    char line[256];
    std::snprintf(line, sizeof line, "criterion %d %-34s %s  (%zu checks, %.1f s of %.0f s)", c.id, c.title,
                  ok ? "PASS" : "FAIL", checks.size(), secs, c.budget);
    std::cout << line << (why.empty() ? "" : "  failing: " + why) << std::endl;

    nlohmann::ordered_json entry;
    entry["criterion"] = c.id;
    entry["title"] = c.title;
    entry["pass"] = ok;
    entry["seconds"] = secs;
    entry["budget"] = c.budget;
    if (!error.empty()) entry["error"] = error;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& k : checks) arr.push_back(nlohmann::ordered_json::parse(k.to_json()));
    entry["checks"] = arr;
    report.push_back(entry);
  }
  std::ofstream("acceptance_report.json") << report.dump(2) << "\n";
  return failed ? 1 : 0;
}
