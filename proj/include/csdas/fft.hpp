#pragma once

#include <complex>

#include "csdas/types.hpp"

namespace csdas {

// Unitary DFT helpers on top of FFTW (both directions scaled by 1/sqrt(N),
// so forward·inverse is the identity and Parseval holds without factors).
// Plans are cached per length and created with FFTW_ESTIMATE; measured plans
// can differ between runs, which would break byte-identical outputs.

/// Forward unitary DFT of a complex vector.
CVec fft_unitary(const CVec& in);

/// Inverse unitary DFT.
CVec ifft_unitary(const CVec& in);

/// Forward unitary DFT of a real vector.
CVec fft_unitary(const Vec& in);

/// Real part of the inverse unitary DFT (for spectra of real signals).
Vec ifft_unitary_real(const CVec& in);

/// Circular correlation h[i] = sum_j f[(j-i) mod n] x[j], i.e. the action of
/// the matrix whose first row is f with every row rotated one to the right.
Vec circular_correlate(const Vec& f, const Vec& x);

/// Circular convolution (f * x)[i] = sum_j f[(i-j) mod n] x[j].
Vec circular_convolve(const Vec& f, const Vec& x);

}  // namespace csdas
