#include "edgewise/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace edgewise {
namespace {

using PlanKey = std::tuple<std::vector<int>, int, int>;  // dims, axis (-1 = all), sign

std::mutex plan_mutex;
std::map<PlanKey, fftw_plan>& plan_cache() {
  static std::map<PlanKey, fftw_plan> cache;
  return cache;
}

fftw_plan get_plan(const BoxGrid& g, int axis, int sign) {
  std::vector<int> dims;
  for (const auto& a : g.axes()) dims.push_back(a.n);
  PlanKey key{dims, axis, sign};
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::vector<fftw_iodim> tdims, loops;
  for (int i = 0; i < g.rank(); ++i) {
    fftw_iodim d{dims[i], static_cast<int>(g.stride(i)), static_cast<int>(g.stride(i))};
    if (axis < 0 || axis == i)
      tdims.push_back(d);
    else
      loops.push_back(d);
  }
  // The planner does not read the buffer with FFTW_ESTIMATE.
  auto* buf = fftw_alloc_complex(g.size());
  fftw_plan p = fftw_plan_guru_dft(static_cast<int>(tdims.size()), tdims.data(),
                                   static_cast<int>(loops.size()), loops.data(), buf, buf,
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache.emplace(key, p);
  return p;
}

// Applies (-1)^(sum of indices over the transformed axes).
void checkerboard(cplx* data, const BoxGrid& g, int axis) {
  const int D = g.rank();
  if (axis >= 0) {
    const std::size_t st = g.stride(axis), n = g.axis(axis).n;
    for (std::size_t f = 0; f < g.size(); ++f)
      if ((f / st) % n & 1) data[f] = -data[f];
    return;
  }
  // odometer over all but the last axis; the last axis alternates
  const std::size_t last = g.axis(D - 1).n;
  std::vector<int> idx(D, 0);
  int par = 0;
  for (std::size_t row = 0; row < g.size(); row += last) {
    cplx* r = data + row;
    for (std::size_t j = (par & 1) ? 0 : 1; j < last; j += 2) r[j] = -r[j];
    for (int i = D - 2; i >= 0; --i) {
      ++par;
      if (++idx[i] < g.axis(i).n) break;
      par -= g.axis(i).n;
      idx[i] = 0;
    }
  }
}

// exp(-+ i pi n/2) per transformed axis.
double global_sign(const BoxGrid& g, int axis) {
  double s = 1.0;
  for (int i = 0; i < g.rank(); ++i)
    if ((axis < 0 || axis == i) && (g.axis(i).n / 2) % 2 == 1) s = -s;
  return s;
}

void run(cplx* data, const BoxGrid& g, int axis, int sign) {
  fftw_plan p = get_plan(g, axis, sign);
  checkerboard(data, g, axis);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
  checkerboard(data, g, axis);
  double s = global_sign(g, axis);
  if (s < 0)
    for (std::size_t f = 0; f < g.size(); ++f) data[f] = -data[f];
}

}  // namespace

void centered_dft(cplx* data, const BoxGrid& g, int sign) { run(data, g, -1, sign); }

void centered_dft_axis(cplx* data, const BoxGrid& g, int axis, int sign) {
  run(data, g, axis, sign);
}

cvec fourier(const cvec& a, const BoxGrid& g) {
  cvec out = a;
  centered_dft(out.data(), g, -1);
  double c = g.cell();
  for (auto& v : out) v *= c;
  return out;
}

cvec inverse_fourier(const cvec& a, const BoxGrid& g) {
  cvec out = a;
  centered_dft(out.data(), g, +1);
  double c = g.freq_cell();
  for (auto& v : out) v *= c;
  return out;
}

}  // namespace edgewise
