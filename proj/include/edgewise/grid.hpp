#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace edgewise {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

// One periodized axis: nodes t_j = (j - n/2) * len / n, j = 0..n-1.
struct Axis {
  int n = 0;
  double len = 0.0;

  double step() const { return len / n; }
  double node(int j) const { return (j - n / 2) * step(); }
  // Frequency dual to the axis: (j - n/2) / len, spacing 1/len.
  double freq(int j) const { return (j - n / 2) / len; }
  double nyquist() const { return n / (2.0 * len); }
  bool operator==(const Axis&) const = default;
};

// Row-major box grid, last axis fastest.
class BoxGrid {
 public:
  BoxGrid() = default;
  explicit BoxGrid(std::vector<Axis> axes);

  int rank() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int i) const { return axes_[i]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int i) const { return strides_[i]; }
  double cell() const;  // product of steps
  double freq_cell() const;  // product of 1/len

  // Multi-index of a flat index.
  void unravel(std::size_t flat, std::vector<int>& idx) const;
  std::size_t ravel(const std::vector<int>& idx) const;
  // Point coordinates of a flat index.
  void point(std::size_t flat, std::vector<double>& p) const;
  void frequency(std::size_t flat, std::vector<double>& p) const;

  bool operator==(const BoxGrid& o) const { return axes_ == o.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

// Square signal grid on R^d.
struct GridSpec {
  int d = 1;
  int n = 512;
  double len = 32.0;

  GridSpec() = default;
  GridSpec(int d_, int n_, double len_);

  double step() const { return len / n; }
  BoxGrid box() const;
  std::size_t size() const;
  bool operator==(const GridSpec&) const = default;
};

// Phase-space grid matching the midpoint quantization of signals on g:
// x-axes (2n, len), w-axes (2n, n/len).
BoxGrid weyl_grid(const GridSpec& g);

// Phase-space grid with the same (n, len) on all 2d axes.
BoxGrid square_phase_grid(int d, int n, double len);

// Wrap an integer into [-n/2, n/2).
inline int wrap_index(long long k, int n) {
  long long m = ((k % n) + n) % n;
  return static_cast<int>(m >= n / 2 ? m - n : m);
}

}  // namespace edgewise
