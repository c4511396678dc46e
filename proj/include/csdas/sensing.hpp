#pragma once

#include <map>
#include <string>

#include "csdas/types.hpp"

namespace csdas {

enum class MatrixKind { gaussian, row_orthonormal_gaussian, identity };

MatrixKind matrix_kind_from_string(const std::string& s);
const char* to_string(MatrixKind kind);

/// Fixed M x N measurement operator. Immutable after construction and safe
/// to share across threads; persisted by (n, mr, seed, kind) only.
struct ObservationMatrix {
  Mat entries;  // M x N
  std::uint64_t seed = 0;
  double mr = 0.0;
  MatrixKind kind = MatrixKind::gaussian;

  Eigen::Index m() const { return entries.rows(); }
  Eigen::Index n() const { return entries.cols(); }

  /// Stable identifier used to match compressed artifacts to their matrix.
  std::string id() const;
};

/// Builds the measurement operator. Gaussian entries are i.i.d. N(0, 1/M);
/// the row-orthonormal kind orthonormalizes that draw (Gram-Schmidt result,
/// computed as Cholesky QR) so that phi phi^T = I to 1e-12.
/// identity requires mr = 1.
ObservationMatrix make_observation_matrix(Eigen::Index n, double mr,
                                          std::uint64_t seed, MatrixKind kind);

/// y = phi x. Modality is preserved; lengths must agree.
CompressedTrace compress(const ObservationMatrix& matrix, const Trace& trace);

/// Batched form: one column per window. Used by the feature pipeline so the
/// heavy multiply runs as a single GEMM.
Mat compress_columns(const ObservationMatrix& matrix, const Mat& columns);

/// Unitary DFT coefficients of the trace (the sparse-basis analysis side).
CVec dft_coefficients(const Trace& trace);

/// Magnitude profile of the DFT coefficients, sorted descending and
/// normalized so the largest is 1.
struct SparsityProfile {
  Vec sorted_magnitudes;
  std::map<double, Eigen::Index> k_at_fraction;
};

/// k_at_fraction[f] = smallest index i with sorted_magnitudes[i] <= f
/// (= number of coefficients above that fraction); N if none fall below.
SparsityProfile sparsity_profile(const Trace& trace,
                                 const std::vector<double>& fractions);

}  // namespace csdas
