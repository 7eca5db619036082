#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace edgewise::cli {

enum ExitCode { kOk = 0, kFailed = 1, kUsage = 2, kError = 3 };

struct VerifyArgs {
  std::string suite;
  double tighten = 1;
  std::string out_dir;  // report also written to <out_dir>/verify-<suite>.json
  std::optional<unsigned long long> seed;
  int threads = 1;
};

struct SweepArgs {
  std::string config_path, out_dir;
  std::optional<int> threads;
  std::optional<unsigned long long> seed;
};

// The report goes to out, diagnostics to err.
int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err);

// Full command line, as main sees it.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace edgewise::cli
