#include "edgewise/grid.hpp"

#include "edgewise/errors.hpp"

namespace edgewise {

BoxGrid::BoxGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw DimensionError("grid needs at least one axis");
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (int i = rank() - 1; i >= 0; --i) {
    if (axes_[i].n < 2 || axes_[i].n % 2 != 0 || !(axes_[i].len > 0))
      throw DimensionError("axis needs even n >= 2 and positive length");
    strides_[i] = size_;
    size_ *= static_cast<std::size_t>(axes_[i].n);
  }
}

double BoxGrid::cell() const {
  double c = 1.0;
  for (const auto& a : axes_) c *= a.step();
  return c;
}

double BoxGrid::freq_cell() const {
  double c = 1.0;
  for (const auto& a : axes_) c /= a.len;
  return c;
}

void BoxGrid::unravel(std::size_t flat, std::vector<int>& idx) const {
  idx.resize(axes_.size());
  for (int i = 0; i < rank(); ++i) {
    idx[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
}

std::size_t BoxGrid::ravel(const std::vector<int>& idx) const {
  std::size_t f = 0;
  for (int i = 0; i < rank(); ++i) f += strides_[i] * static_cast<std::size_t>(idx[i]);
  return f;
}

void BoxGrid::point(std::size_t flat, std::vector<double>& p) const {
  p.resize(axes_.size());
  for (int i = 0; i < rank(); ++i) {
    int j = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
    p[i] = axes_[i].node(j);
  }
}

void BoxGrid::frequency(std::size_t flat, std::vector<double>& p) const {
  p.resize(axes_.size());
  for (int i = 0; i < rank(); ++i) {
    int j = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
    p[i] = axes_[i].freq(j);
  }
}

GridSpec::GridSpec(int d_, int n_, double len_) : d(d_), n(n_), len(len_) {
  if (d < 1) throw DimensionError("grid dimension must be positive");
  if (n < 8 || n % 2 != 0) throw DimensionError("grid needs even n >= 8");
  if (!(len > 0)) throw DimensionError("grid period must be positive");
}

BoxGrid GridSpec::box() const { return BoxGrid(std::vector<Axis>(d, Axis{n, len})); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

BoxGrid weyl_grid(const GridSpec& g) {
  std::vector<Axis> ax;
  for (int i = 0; i < g.d; ++i) ax.push_back({2 * g.n, g.len});
  for (int i = 0; i < g.d; ++i) ax.push_back({2 * g.n, g.n / g.len});
  return BoxGrid(ax);
}

BoxGrid square_phase_grid(int d, int n, double len) {
  return BoxGrid(std::vector<Axis>(2 * d, Axis{n, len}));
}

}  // namespace edgewise
