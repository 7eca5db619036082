#include <json.hpp>

#include "edgewise/errors.hpp"
#include "verify/common.hpp"

namespace edgewise::verify {

namespace {

using json = nlohmann::ordered_json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void append(Checks& a, Checks b) { a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end())); }

Checks only(const Checks& c, const std::string& suite) {
  Checks out;
  for (const auto& x : c)
    if (x.suite == suite) out.push_back(x);
  return out;
}

}  // namespace

std::string Check::to_json() const {
  json j;
  j["suite"] = suite;
  j["name"] = name;
  j["value"] = num(value);
  j["tol"] = num(tol);
  j["pass"] = pass;
  j["detail"] = detail;
  j["seconds"] = seconds;
  return j.dump();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"tfcore", "modnorm", "weyl", "gabor", "spectra", "harper"};
  return names;
}

Checks run_suite(const std::string& name, const Options& opt) {
  if (name.empty()) throw PreconditionError("verify: empty suite name");
  Checks c;
  if (name == "all") {
    for (const auto& s : suite_names())
      if (s != "modnorm" && s != "gabor") append(c, run_suite(s, opt));
    // the corpus feeds both modnorm and gabor; run it once
    Checks corpus = norm_corpus(opt);
    append(c, only(corpus, "modnorm"));
    append(c, gabor_extra(opt));
    append(c, frame_oracle(opt));
    append(c, alpha_sweeps(opt));
    append(c, only(corpus, "gabor"));
    return c;
  }
  if (name == "tfcore") {
    append(c, tf_identities(opt));
    append(c, tf_multiplier(opt));
    append(c, tfcore_extra(opt));
  } else if (name == "modnorm") {
    c = only(norm_corpus(opt), "modnorm");
  } else if (name == "weyl") {
    append(c, weyl_algebra(opt));
    append(c, truncation_law(opt));
    append(c, heat_flow_law(opt));
    append(c, weyl_extra(opt));
  } else if (name == "spectra") {
    c = spectra_suite(opt);
  } else if (name == "harper") {
    append(c, harper_edges(opt));
    append(c, harper_extra(opt));
  } else if (name == "gabor") {
    append(c, gabor_extra(opt));
    append(c, frame_oracle(opt));
    append(c, alpha_sweeps(opt));
    append(c, only(norm_corpus(opt), "gabor"));
  } else {
    throw PreconditionError("verify: unknown suite '" + name + "'");
  }
  return c;
}

bool all_pass(const Checks& c) {
  for (const auto& x : c)
    if (!x.pass) return false;
  return true;
}

std::string report_json(const Checks& c, const std::string& suite, const Options& opt) {
  json j;
  j["suite"] = suite;
  j["library_version"] = EDGEWISE_VERSION;
  j["tighten"] = opt.tighten;
  j["seed"] = opt.seed;
  j["pass"] = all_pass(c);
  json checks = json::array(), failures = json::array();
  for (const auto& x : c) {
    checks.push_back(json::parse(x.to_json()));
    if (!x.pass) failures.push_back(x.suite + ": " + x.name);
  }
  j["checks"] = checks;
  j["failures"] = failures;
  return j.dump(2);
}

}  // namespace edgewise::verify
