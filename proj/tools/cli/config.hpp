#pragma once

#include <string>
#include <vector>

#include "edgewise/harper.hpp"

namespace edgewise::cli {

inline constexpr int kConfigVersion = 1;

// Parsed sweep configuration. Keys not listed here are rejected; keys that belong to
// another kind are rejected too, so a config says exactly what it runs.
struct RunConfig {
  int version = kConfigVersion;
  std::string kind;  // alpha, flux, delta
  unsigned long long seed = 2024;
  int threads = 1;

  // alpha
  std::string window = "gaussian";
  std::string points = "lattice";  // lattice, jittered, csv
  double jitter = 0.2;
  std::string points_path;
  std::vector<double> alphas;
  double T = 8, section_step = 0.5, cutoff = 1e-12;
  double alpha0 = 0.75, fit_from = 0.9;
  bool zak_oracle = false;
  long zak_qmax = 200;

  // flux, delta
  std::string symbol = R"({"builtin":"harper"})";
  std::vector<FluxRational> fluxes;
  std::vector<double> deltas;  // targets; fluxes hold their rationalizations
  long qmax = 200;
  int bloch_m = 32;

  // canonical JSON of every resolved field; the hash is taken over this text
  std::string canonical() const;
  std::string hash() const;
};

// Throws ConfigError with the offending key.
// FourierSymbol::from_json plus {"builtin": "gaussian_lattice", "K": k}, the Janssen
// form of the Gaussian frame operator on the square lattice.
FourierSymbol resolve_symbol(const std::string& json_text);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace edgewise::cli
