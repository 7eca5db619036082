#include <algorithm>
#include <random>

#include "edgewise/fft.hpp"
#include "edgewise/tfcore.hpp"
#include "edgewise/weyl.hpp"
#include "verify/common.hpp"

namespace edgewise::verify {

namespace {

const char* kSuite = "tfcore";

PhasePoint pp(double x, double w) { return PhasePoint({x}, {w}); }

void scale(Signal& f, cplx c) {
  for (auto& v : f.samples) v *= c;
}

Signal add(const Signal& a, const Signal& b, cplx cb = 1) {
  Signal r = a;
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] += cb * b.samples[i];
  return r;
}

Signal unit(Signal f) {
  scale(f, 1.0 / f.norm());
  return f;
}

// Gaussian-type probes concentrated in |z| <= 1.5
std::vector<Signal> probes(const GridSpec& g) {
  Signal phi = gaussian(g);
  Signal h1 = make_window({WindowKind::hermite, 1}, g), h2 = make_window({WindowKind::hermite, 2}, g);
  std::vector<Signal> out;
  out.push_back(phi);
  out.push_back(unit(add(h1, tf_shift(h2, pp(0.4, -0.7)), cplx(0, 0.5))));
  out.push_back(unit(add(tf_shift(phi, pp(-1.0, 0.5)), tf_shift(h1, pp(0.8, 0.9)), cplx(0.3, -0.6))));
  out.push_back(unit(tf_shift(h2, pp(0.3, 0.2))));
  return out;
}

double l2_dev(const Signal& a, const Signal& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) s += std::norm(a.samples[i] - b.samples[i]);
  return std::sqrt(s * std::pow(a.grid.step(), a.grid.d));
}

// V_g f(x, w) by direct quadrature; g evaluated by the callback at t - x
cplx stft_at(const Signal& f, const std::function<cplx(double)>& g, double x, double w) {
  const Axis ax = f.grid.box().axis(0);
  cplx s = 0;
  for (int j = 0; j < ax.n; ++j) {
    double t = ax.node(j);
    s += f.samples[j] * std::conj(g(t - x)) * std::polar(1.0, -2 * kPi * w * t);
  }
  return s * ax.step();
}

cplx phi_at(double t) { return std::pow(2.0, 0.25) * std::exp(-kPi * t * t); }

// g at t - x for x a multiple of the grid step, from the samples
std::function<cplx(double)> sampled(const Signal& g) {
  const Axis ax = g.grid.box().axis(0);
  return [ax, &g](double t) {
    long j = std::lround(t / ax.step()) + ax.n / 2;
    j = ((j % ax.n) + ax.n) % ax.n;
    return g.samples[j];
  };
}

// Atoms rho(z) phi on a square phase grid of the given step and half-width.
struct Atoms {
  std::vector<PhasePoint> z;
  std::vector<Signal> a;
  double cell = 0;
};

Atoms atom_grid(const GridSpec& g, double step, double half) {
  Atoms at;
  Signal phi = gaussian(g);
  int K = static_cast<int>(std::floor(half / step + 1e-9));
  for (int i = -K; i <= K; ++i)
    for (int j = -K; j <= K; ++j) {
      at.z.push_back(pp(i * step, j * step));
      at.a.push_back(tf_shift(phi, at.z.back()));
    }
  at.cell = step * step;
  return at;
}

// sum_z' cell m(z') <f, rho(z') phi> rho(z') phi
Signal atom_sum(const Atoms& at, const Signal& f, const std::function<cplx(const PhasePoint&)>& m) {
  Signal out = Signal::zeros(f.grid);
  for (std::size_t k = 0; k < at.z.size(); ++k) {
    cplx c = at.cell * m(at.z[k]) * inner(f, at.a[k]);
    const cvec& a = at.a[k].samples;
    for (std::size_t i = 0; i < a.size(); ++i) out.samples[i] += c * a[i];
  }
  return out;
}

const GridSpec kG(1, 512, 32);

Check composition_conjugation(const Options& opt, bool conj) {
  const std::string name = conj ? "conjugation" : "composition";
  return guarded(kSuite, name, opt, [&] {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(-2, 2);
    auto fs = probes(kG);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const Signal& f = fs[k % fs.size()];
      PhasePoint z = pp(U(rng), U(rng)), zp = pp(U(rng), U(rng));
      Signal a, b;
      if (!conj) {
        a = tf_shift(tf_shift(f, zp), z);
        b = tf_shift(f, z + zp);
        scale(b, std::polar(1.0, kPi * symplectic(z, zp)));
      } else {
        a = tf_shift(tf_shift(tf_shift(f, z), zp), -z);
        b = tf_shift(f, zp);
        scale(b, std::polar(1.0, 2 * kPi * symplectic(zp, z)));
      }
      worst = std::max(worst, l2_dev(a, b) / f.norm());
    }
    return make_check(kSuite, name, worst, 1e-8, opt, "100 random pairs in [-2, 2]^2, n = 512");
  });
}

Check isometry(const Options& opt) {
  return guarded(kSuite, "stft isometry", opt, [&] {
    auto fs = probes(kG);
    std::vector<Signal> wins = {gaussian(kG), make_window({WindowKind::hermite, 1}, kG)};
    BoxGrid pg = stft_grid(kG, 4, 1);
    double worst = 0;
    for (const auto& g : wins)
      for (const auto& f : fs) {
        PhaseFunction V = stft(f, g, pg);
        double s = 0;
        for (const auto& v : V.samples) s += std::norm(v);
        s *= pg.cell();
        worst = std::max(worst, std::abs(s / std::norm(f.norm()) - 1));
      }
    return make_check(kSuite, "stft isometry", worst, 1e-6, opt, "|V_g f|_2^2 / |f|^2 - 1, two unit windows");
  });
}

Check moyal(const Options& opt) {
  return guarded(kSuite, "moyal normalization", opt, [&] {
    auto fs = probes(kG);
    double worst = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const Signal& f = fs[i];
      const Signal& g = fs[(i + 1) % fs.size()];
      PhaseFunction W = wigner(f, f), Wfg = wigner(f, g);
      cplx s = 0, sfg = 0;
      for (std::size_t k = 0; k < W.samples.size(); ++k) {
        s += W.samples[k];
        sfg += Wfg.samples[k];
      }
      s *= W.grid.cell();
      sfg *= W.grid.cell();
      worst = std::max(worst, std::abs(s - std::norm(f.norm())) / std::norm(f.norm()));
      worst = std::max(worst, std::abs(sfg - inner(f, g)) / (f.norm() * g.norm()));
    }
    return make_check(kSuite, "moyal normalization", worst, 1e-8, opt, "int W(f) = |f|^2 and int W(f, g) = <f, g>");
  });
}

// V_g(f h)(x, w) = int h^(xi) V_g f(x, w - xi) d xi for a band-limited h
Check product_rule(const Options& opt) {
  return guarded(kSuite, "stft of a product", opt, [&] {
    const Axis ax = kG.box().axis(0);
    const int n = ax.n;
    Signal h = Signal::zeros(kG);
    for (int j = 0; j < n; ++j) {
      double t = ax.node(j);
      h.samples[j] = std::exp(-kPi * t * t / 4) * cplx(1 + 0.5 * std::cos(1.5 * kPi * t), 0.3 * std::sin(kPi * t));
    }
    // h^ on the dual nodes (j - n/2) / len
    cvec hhat(n);
    for (int m = 0; m < n; ++m) {
      cplx s = 0;
      for (int j = 0; j < n; ++j) s += h.samples[j] * std::polar(1.0, -2 * kPi * ax.freq(m) * ax.node(j));
      hhat[m] = s * ax.step();
    }
    double hmax = 0;
    for (auto v : hhat) hmax = std::max(hmax, std::abs(v));
    BoxGrid pg = stft_grid(kG, 8, 1);
    const int nx = pg.axis(0).n, nw = pg.axis(1).n;
    Signal g = make_window({WindowKind::hermite, 1}, kG);
    double worst = 0;
    for (const auto& f : probes(kG)) {
      Signal fh = f;
      for (int j = 0; j < n; ++j) fh.samples[j] *= h.samples[j];
      PhaseFunction lhs = stft(fh, g, pg), V = stft(f, g, pg);
      double err = 0, ref = 0;
      for (int xi = 0; xi < nx; ++xi)
        for (int k = 0; k < nw; ++k) {
          // w_k - xi_m = (k - m) / len, wrapped over the band
          cplx s = 0;
          for (int m = 0; m < n; ++m) {
            if (std::abs(hhat[m]) <= 1e-17 * hmax) continue;
            int idx = ((k - m + n / 2) % nw + nw) % nw;
            s += hhat[m] * V.samples[xi * nw + idx];
          }
          s /= ax.len;
          err = std::max(err, std::abs(lhs.samples[xi * nw + k] - s));
          ref = std::max(ref, std::abs(s));
        }
      worst = std::max(worst, err / ref);
    }
    return make_check(kSuite, "stft of a product", worst, 1e-6, opt, "V_g(f h) against h^ *_2 V_g f");
  });
}

// F(V_phi f conj V_phi g)(z) = U^{-1}(V_g f conj V_phi phi)(z); both flips are measured.
Check fourier_of_product(const Options& opt) {
  return guarded(kSuite, "fourier transform of an stft product", opt, [&] {
    BoxGrid pg = stft_grid(kG, 2, 4);  // dual box +-4, where V_phi phi is ~1e-11
    Signal phi = gaussian(kG);
    auto fs = probes(kG);
    const Signal& f = fs[1];
    const Signal& g = fs[2];
    PhaseFunction Vf = stft(f, phi, pg), Vg = stft(g, phi, pg);
    cvec P(pg.size());
    for (std::size_t k = 0; k < P.size(); ++k) P[k] = Vf.samples[k] * std::conj(Vg.samples[k]);
    cvec lhs = fourier(P, pg);
    BoxGrid dual = dual_of(pg);
    auto gs = sampled(g), ps = sampled(phi);
    std::vector<double> zeta;
    double err_inv = 0, err_fwd = 0, ref = 0;
    for (std::size_t k = 0; k < dual.size(); ++k) {
      dual.point(k, zeta);
      double a = zeta[0], b = zeta[1];
      // U^{-1} F(a, b) = F(-b, a); U F(a, b) = F(b, -a)
      cplx inv = stft_at(f, gs, -b, a) * std::conj(stft_at(phi, ps, -b, a));
      cplx fwd = stft_at(f, gs, b, -a) * std::conj(stft_at(phi, ps, b, -a));
      err_inv = std::max(err_inv, std::abs(lhs[k] - inv));
      err_fwd = std::max(err_fwd, std::abs(lhs[k] - fwd));
      ref = std::max(ref, std::abs(inv));
    }
    err_inv /= ref;
    err_fwd /= ref;
    return make_check(kSuite, "fourier transform of an stft product", err_inv, 1e-6, opt,
                      str("with U^{-1}: ", err_inv, ", with U: ", err_fwd));
  });
}

// |V_Phi W(f, g)(x, w)| = |V_phi f(x - w~/2) V_phi g(x + w~/2)|, Phi = W(phi, phi) = 2 exp(-2 pi |y|^2)
Check wigner_stft_magnitude(const Options& opt) {
  return guarded(kSuite, "stft of a wigner distribution", opt, [&] {
    auto fs = probes(kG);
    const Signal& f = fs[1];
    const Signal& g = fs[3];
    PhaseFunction W = wigner(f, g);
    const Axis a0 = W.grid.axis(0), a1 = W.grid.axis(1);
    const double cut = 2.3;
    std::mt19937_64 rng(opt.seed + 1);
    std::uniform_real_distribution<double> U(-1, 1);
    double err = 0, ref = 0;
    for (int s = 0; s < 60; ++s) {
      double x1 = U(rng), x2 = U(rng), w1 = U(rng), w2 = U(rng);
      int i0 = std::max(0, int(std::ceil((x1 - cut) / a0.step())) + a0.n / 2);
      int i1 = std::min(a0.n - 1, int(std::floor((x1 + cut) / a0.step())) + a0.n / 2);
      int j0 = std::max(0, int(std::ceil((x2 - cut) / a1.step())) + a1.n / 2);
      int j1 = std::min(a1.n - 1, int(std::floor((x2 + cut) / a1.step())) + a1.n / 2);
      std::vector<cplx> e2(j1 - j0 + 1);
      std::vector<double> g2(j1 - j0 + 1);
      for (int j = j0; j <= j1; ++j) {
        double y2 = a1.node(j);
        e2[j - j0] = std::polar(1.0, -2 * kPi * w2 * y2);
        g2[j - j0] = std::exp(-2 * kPi * (y2 - x2) * (y2 - x2));
      }
      cplx V = 0;
      for (int i = i0; i <= i1; ++i) {
        double y1 = a0.node(i);
        cplx row = 0;
        const cplx* Wr = W.samples.data() + std::size_t(i) * a1.n;
        for (int j = j0; j <= j1; ++j) row += Wr[j] * g2[j - j0] * e2[j - j0];
        V += row * 2.0 * std::exp(-2 * kPi * (y1 - x1) * (y1 - x1)) * std::polar(1.0, -2 * kPi * w1 * y1);
      }
      V *= W.grid.cell();
      // w~ = (w2, -w1)
      double t1 = w2, t2 = -w1;
      cplx r = stft_at(f, phi_at, x1 - t1 / 2, x2 - t2 / 2) * stft_at(g, phi_at, x1 + t1 / 2, x2 + t2 / 2);
      err = std::max(err, std::abs(std::abs(V) - std::abs(r)));
      ref = std::max(ref, std::abs(r));
    }
    return make_check(kSuite, "stft of a wigner distribution", err / ref, 1e-6, opt,
                      "60 random (x, w) in [-1, 1]^4, Phi = W(phi, phi)");
  });
}

Check resolution_of_identity(const Options& opt, const Atoms& at) {
  return guarded(kSuite, "resolution of the identity", opt, [&] {
    double worst = 0;
    for (const auto& f : probes(kG)) {
      Signal S = atom_sum(at, f, [](const PhasePoint&) { return cplx(1); });
      worst = std::max(worst, l2_dev(S, f) / f.norm());
    }
    return make_check(kSuite, "resolution of the identity", worst, 1e-6, opt,
                      str(at.z.size(), " projections q(z), step 0.2, |z|_inf <= 6"));
  });
}

}  // namespace

Checks tf_identities(const Options& opt) {
  Checks c;
  c.push_back(composition_conjugation(opt, false));
  c.push_back(composition_conjugation(opt, true));
  c.push_back(isometry(opt));
  c.push_back(moyal(opt));
  c.push_back(product_rule(opt));
  c.push_back(fourier_of_product(opt));
  c.push_back(wigner_stft_magnitude(opt));
  return c;
}

Checks tf_multiplier(const Options& opt) {
  Checks c;
  c.push_back(guarded(kSuite, "phase-space shift from projections", opt, [&] {
    Atoms at = atom_grid(kG, 0.2, 6.0);
    double worst = 0;
    std::vector<PhasePoint> zs = {pp(0, 0),    pp(1, 0),      pp(0, -1),     pp(0.6, 0.8),
                                  pp(-0.5, 0.3), pp(0.7, -0.7), pp(-0.9, -0.4), pp(0.25, 0.95)};
    for (const auto& z : zs)
      for (const auto& f : probes(kG)) {
        Signal L = atom_sum(at, f, [&](const PhasePoint& zp) { return std::polar(1.0, 2 * kPi * symplectic(z, zp)); });
        scale(L, std::exp(kPi * z.abs() * z.abs() / 2));
        worst = std::max(worst, l2_dev(L, tf_shift(f, z)) / f.norm());
      }
    return make_check(kSuite, "phase-space shift from projections", worst, 1e-6, opt,
                      str("8 points |z| <= 1, 4 probes, ", at.z.size(), " projections at step 0.2"));
  }));
  return c;
}

Checks tfcore_extra(const Options& opt) {
  Checks c;
  c.push_back(guarded(kSuite, "unitarity", opt, [&] {
    std::mt19937_64 rng(opt.seed + 2);
    std::uniform_real_distribution<double> U(-2, 2);
    auto fs = probes(kG);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const Signal& f = fs[k % fs.size()];
      worst = std::max(worst, std::abs(tf_shift(f, pp(U(rng), U(rng))).norm() - f.norm()) / f.norm());
    }
    return make_check(kSuite, "unitarity", worst, 1e-10, opt, "100 random z in [-2, 2]^2");
  }));
  c.push_back(resolution_of_identity(opt, atom_grid(kG, 0.2, 6.0)));
  c.push_back(guarded(kSuite, "stft covariance", opt, [&] {
    BoxGrid pg = stft_grid(kG, 8, 8);
    Signal g = make_window({WindowKind::hermite, 1}, kG);
    const Signal f = probes(kG)[2];
    // w on the grid of pg: x by 1 = 2 x-steps, w by 0.5 = 2 w-steps
    PhaseFunction V = stft(f, g, pg), Vs = stft(tf_shift(f, pp(1.0, 0.5)), g, pg);
    const int nx = pg.axis(0).n, nw = pg.axis(1).n;
    double err = 0, ref = 0;
    for (int i = 2; i < nx; ++i)
      for (int k = 2; k < nw; ++k) {
        double a = std::abs(Vs.samples[i * nw + k]), b = std::abs(V.samples[(i - 2) * nw + (k - 2)]);
        err = std::max(err, std::abs(a - b));
        ref = std::max(ref, b);
      }
    return make_check(kSuite, "stft covariance", err / ref, 1e-8, opt, "|V_g(rho(w) f)(z)| = |V_g f(z - w)|");
  }));
  return c;
}

}  // namespace edgewise::verify
