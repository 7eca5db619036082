#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edgewise/grid.hpp"

namespace edgewise {

struct Signal {
  GridSpec grid;
  cvec samples;
  std::string label;

  Signal() = default;
  Signal(GridSpec g, cvec s, std::string l = {});
  static Signal zeros(const GridSpec& g, std::string l = {});

  double norm() const;  // step^{d/2} * Euclidean norm
};

// <f, g> = step^d sum f conj(g)
cplx inner(const Signal& f, const Signal& g);

struct PhasePoint {
  std::vector<double> x, w;

  PhasePoint() = default;
  PhasePoint(std::vector<double> x_, std::vector<double> w_);
  static PhasePoint zero(int d);
  int d() const { return static_cast<int>(x.size()); }
  double abs() const;

  PhasePoint operator+(const PhasePoint& o) const;
  PhasePoint operator-(const PhasePoint& o) const;
  PhasePoint operator-() const;
  PhasePoint operator*(double s) const;
};

// [z, z'] = x'.w - x.w'
double symplectic(const PhasePoint& z, const PhasePoint& zp);

// Samples of a function on R^{2d}; x-axes first, then w-axes.
struct PhaseFunction {
  BoxGrid grid;
  cvec samples;
  std::optional<double> tail;  // max magnitude on the grid boundary

  int d() const { return grid.rank() / 2; }
  double l2_norm() const;
};

// Max |f| on the outer boundary layer of the box, relative to max |f|.
double boundary_tail(const cvec& a, const BoxGrid& g);
// Max |F| on the outer frequency layer, relative to max |F|.
double spectral_tail(const cvec& a, const BoxGrid& g);

// rho(z) f = exp(-i pi x.w) M_w T_x f. Translation by a Fourier ramp.
Signal tf_shift(const Signal& f, const PhasePoint& z);

// Phase grid for the STFT: x step = xdec * h over the period, w step = wdec / len
// over the full band 1/h.
BoxGrid stft_grid(const GridSpec& g, int xdec, int wdec);

// V_g f(x, w) = <f, M_w T_x g> on pgrid.
PhaseFunction stft(const Signal& f, const Signal& g, const BoxGrid& pgrid);

// STFT of samples on an arbitrary box grid sg (rank D) onto pgrid (rank 2D).
PhaseFunction stft_box(const cvec& f, const cvec& g, const BoxGrid& sg, const BoxGrid& pgrid);

// Cross-Wigner distribution on weyl_grid(f.grid). With wrap the signals are periodic and
// every pair of points has a second midpoint half a period away; without it they are cut
// to the box, which drops that ghost copy.
PhaseFunction wigner(const Signal& f, const Signal& g, bool wrap = true);

// Zak transform Zf(x, w) = sum_k f(x - a k) exp(2 pi i a k w) on the centered
// fundamental domain [-a/2, a/2) x [-1/(2a), 1/(2a)), nx by nw nodes. d = 1.
PhaseFunction zak(const Signal& f, double a, int nx = 64, int nw = 64);

// Band-limited interpolation of a d = 1 signal at arbitrary points.
class Interpolant {
 public:
  explicit Interpolant(const Signal& f);
  cplx operator()(double t) const;

 private:
  double len_;
  std::vector<double> nu_;
  cvec coef_;
};

enum class WindowKind { gaussian, hermite, one_sided_exp, two_sided_exp };

struct WindowSpec {
  WindowKind kind = WindowKind::gaussian;
  int order = 0;  // hermite order
};

WindowSpec parse_window(const std::string& s);  // "gaussian", "hermite3", ...
std::string to_string(const WindowSpec& w);

Signal make_window(const WindowSpec& spec, const GridSpec& g);
inline Signal gaussian(const GridSpec& g) { return make_window({}, g); }

// Binary container: "EDGW", u32 version, u32 dtype (1 = complex128),
// u32 d, u32 rank, rank x (u32 n, f64 len), payload; all little-endian.
void write_container(const std::string& path, const BoxGrid& g, int d, const cvec& data);
struct ContainerData {
  BoxGrid grid;
  int d = 0;
  cvec data;
};
ContainerData read_container(const std::string& path);
void save(const std::string& path, const Signal& f);
void save(const std::string& path, const PhaseFunction& F);
Signal load_signal(const std::string& path);
PhaseFunction load_phase_function(const std::string& path);

// CSV: coordinate columns, re, im.
void write_csv(const std::string& path, const BoxGrid& g, const cvec& data);

}  // namespace edgewise
