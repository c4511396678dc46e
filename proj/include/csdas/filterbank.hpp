#pragma once

#include <string>
#include <vector>

#include "csdas/sensing.hpp"
#include "csdas/types.hpp"

namespace csdas {

struct BandSpec {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
  int index = 0;
};

/// Bank of FIR band-pass filters in Nyquist domain. Impulse responses are
/// zero-padded to length n; frequency responses are their unitary DFTs.
/// Rows of abs_frequency_responses are |F_i| so band energies reduce to a
/// matrix product against |X|.
struct FilterBank {
  std::vector<BandSpec> bands;
  Mat impulse_responses;        // n_bands x n
  CMat frequency_responses;     // n_bands x n
  Mat abs_frequency_responses;  // n_bands x n
  Eigen::Index n = 0;
  double sample_rate_hz = 0.0;
  int taps = 0;

  Eigen::Index band_count() const { return impulse_responses.rows(); }
};

/// Compressed-domain projections of a bank through one observation matrix.
struct CompressedFilterBank {
  std::vector<BandSpec> bands;
  Mat compressed_impulse_responses;        // n_bands x m
  CMat compressed_frequency_responses;     // n_bands x m
  Mat abs_compressed_frequency_responses;  // n_bands x m
  std::string matrix_id;
  Eigen::Index m = 0;

  Eigen::Index band_count() const {
    return compressed_impulse_responses.rows();
  }
};

/// Linear-phase windowed-sinc band-pass (Hamming window), scaled to unit
/// gain at the band center (at DC when lo_hz = 0, so the design degenerates
/// to a low-pass). taps must be odd and >= 3.
Vec design_bandpass(double sample_rate_hz, double lo_hz, double hi_hz,
                    int taps);

/// Contiguous bank: band i spans [i*band_width, (i+1)*band_width) Hz.
FilterBank build_filter_bank(double sample_rate_hz, Eigen::Index n,
                             int n_bands = 50, double band_width_hz = 30.0,
                             int taps = 1023);

/// h = A x where A is the circulant with first row f (rows rotated one to
/// the right); evaluated as a frequency-domain product.
Vec circulant_apply(const Vec& impulse_response, const Vec& x);

/// f_c = first row of A_c, A_c = phi A phi^T (phi phi^T)^{-1}. Computed
/// matrix-free: f_c = (phi phi^T)^{-1} phi (A^T r) with r the first row of
/// phi, so no N x N matrix is ever materialized. For row-orthonormal and
/// identity matrices (phi phi^T)^{-1} = I.
Vec project_filter(const Vec& impulse_response,
                   const ObservationMatrix& matrix);

/// Per-band projection of the whole bank plus compressed DFTs.
CompressedFilterBank project_filter_bank(const FilterBank& bank,
                                         const ObservationMatrix& matrix);

}  // namespace csdas
