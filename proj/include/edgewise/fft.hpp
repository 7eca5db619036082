#pragma once

#include "edgewise/grid.hpp"

namespace edgewise {

// Unnormalized centered DFT over all axes of g, in place:
//   F[m] = sum_j a[j] exp(sign * 2 pi i (m - n/2)(j - n/2) / n).
void centered_dft(cplx* data, const BoxGrid& g, int sign);

// Same, restricted to one axis.
void centered_dft_axis(cplx* data, const BoxGrid& g, int axis, int sign);

// Samples of the continuous Fourier transform on the dual grid
// (frequencies (m - n/2)/len per axis).
cvec fourier(const cvec& a, const BoxGrid& g);
// Inverse of fourier().
cvec inverse_fourier(const cvec& a, const BoxGrid& g);

}  // namespace edgewise
