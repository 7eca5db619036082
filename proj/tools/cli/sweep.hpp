#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "edgewise/gabor.hpp"
#include "edgewise/harper.hpp"

namespace edgewise::cli {

// Memo of Zak and Bloch oracle results under $EDGEWISE_CACHE, one JSON file per key.
// Disabled when the variable is unset or empty.
class OracleCache {
 public:
  OracleCache();
  explicit OracleCache(std::string dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }

  std::optional<BandSpectrum> bloch(const FourierSymbol& sym, const std::string& sym_json, const FluxRational& f, int m);
  std::optional<FrameBounds> zak(const Signal& g, const std::string& window, double alpha, long qmax);

  int hits() const { return hits_; }
  int misses() const { return misses_; }

 private:
  std::optional<std::string> load(const std::string& key);
  void store(const std::string& key, const std::string& value);

  std::string dir_;
  std::mutex mu_;
  int hits_ = 0, misses_ = 0;
};

struct RunRecord {
  int schema = 1;
  std::string kind, config_hash, library_version;
  std::string config;   // canonical config JSON
  std::string summary;  // summary JSON, also written to summary.json
  double wall_compute = 0, wall_write = 0, wall_total = 0;
  std::vector<std::string> outputs;
  std::vector<std::string> failures;
  int cache_hits = 0, cache_misses = 0;

  std::string to_json() const;
  static RunRecord from_json(const std::string& text);
  bool operator==(const RunRecord&) const = default;
};

// Runs the sweep and writes CSV, summary.json, SVG plots and run.json into out_dir.
// Per-parameter failures land in the record; artifacts are written regardless.
RunRecord run_sweep(const RunConfig& cfg, const std::string& out_dir, OracleCache& cache);

}  // namespace edgewise::cli
