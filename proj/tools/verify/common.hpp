#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "verify/verify.hpp"

namespace edgewise::verify {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// value <= tol / tighten, NaN fails
inline Check make_check(const std::string& suite, const std::string& name, double value, double tol,
                        const Options& opt, std::string detail = {}, double seconds = 0) {
  Check c;
  c.suite = suite;
  c.name = name;
  c.value = value;
  c.tol = tol / opt.tighten;
  c.pass = std::isfinite(value) && value <= c.tol;
  c.detail = std::move(detail);
  c.seconds = seconds;
  return c;
}

// Runs body and turns a library exception into a failed check.
inline Check guarded(const std::string& suite, const std::string& name, const Options& opt,
                     const std::function<Check()>& body) {
  Stopwatch sw;
  try {
    Check c = body();
    if (c.seconds == 0) c.seconds = sw.seconds();
    return c;
  } catch (const std::exception& e) {
    Check c = make_check(suite, name, NAN, 0, opt, std::string("exception: ") + e.what(), sw.seconds());
    return c;
  }
}

// |a / b - 1| for two fitted constants
inline double drift(double a, double b) { return b != 0 ? std::abs(a / b - 1) : INFINITY; }

template <class... A>
std::string str(const A&... a) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << a);
  return os.str();
}

}  // namespace edgewise::verify
