#pragma once

#include <string>
#include <vector>

namespace edgewise::verify {

// One measured quantity against its tolerance. For identities value is a relative
// deviation; for fitted constants it is the drift between two resolutions.
struct Check {
  std::string suite, name;
  double value = 0, tol = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0;

  std::string to_json() const;
};
using Checks = std::vector<Check>;

struct Options {
  double tighten = 1;  // every tolerance is divided by this
  unsigned long long seed = 2024;
  int threads = 1;
};

const std::vector<std::string>& suite_names();  // module suites, without "all"
// Throws PreconditionError for an unknown or empty name.
Checks run_suite(const std::string& name, const Options& opt = {});

// Groups behind the acceptance criteria, in order 1..9.
Checks tf_identities(const Options& opt);   // composition, conjugation, isometry, Moyal, product rules
Checks tf_multiplier(const Options& opt);   // rho(z) from the integral of rank-one projections
Checks weyl_algebra(const Options& opt);    // two-path products, spreading, hermiticity
Checks truncation_law(const Options& opt);  // err(R) R^2 for the heavy-tail symbol
Checks heat_flow_law(const Options& opt);   // |F - Phi_delta * F| / (delta |d^2 F|)
Checks frame_oracle(const Options& opt);    // finite section against Zak
Checks alpha_sweeps(const Options& opt);    // alpha sweeps, quotient constants and the critical fit
Checks harper_edges(const Options& opt);    // Bloch edges and gaps
Checks norm_corpus(const Options& opt);     // norm inequalities with fitted constants

// Per-module extras that are not part of a criterion.
Checks tfcore_extra(const Options& opt);
Checks weyl_extra(const Options& opt);
Checks spectra_suite(const Options& opt);
Checks harper_extra(const Options& opt);
Checks gabor_extra(const Options& opt);

bool all_pass(const Checks& c);
std::string report_json(const Checks& c, const std::string& suite, const Options& opt);

}  // namespace edgewise::verify
