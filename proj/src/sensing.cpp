#include "csdas/sensing.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "csdas/fft.hpp"
#include "csdas/rng.hpp"

namespace csdas {

void Trace::validate() const {
  if (samples.size() < 2) {
    throw ParameterError("Trace: needs at least 2 samples");
  }
  if (!(sample_rate_hz > 0.0)) {
    throw ParameterError("Trace: sample_rate_hz must be positive");
  }
  if (!samples.allFinite()) {
    throw ParameterError("Trace: samples must be finite");
  }
}

MatrixKind matrix_kind_from_string(const std::string& s) {
  if (s == "gaussian") return MatrixKind::gaussian;
  if (s == "row_orthonormal_gaussian") return MatrixKind::row_orthonormal_gaussian;
  if (s == "identity") return MatrixKind::identity;
  throw ParameterError("unknown matrix kind: " + s);
}

const char* to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::gaussian: return "gaussian";
    case MatrixKind::row_orthonormal_gaussian: return "row_orthonormal_gaussian";
    case MatrixKind::identity: return "identity";
  }
  return "?";
}

std::string ObservationMatrix::id() const {
  std::ostringstream os;
  os << to_string(kind) << ":n" << n() << ":mr" << mr << ":s" << seed;
  return os.str();
}

namespace {

// Cholesky QR: rows of L^{-1} phi are the classical Gram-Schmidt
// orthonormalization of the rows of phi. One refinement pass covers the
// (already tiny) loss of orthogonality from squaring the condition number.
void orthonormalize_rows(Mat& phi) {
  for (int pass = 0; pass < 2; ++pass) {
    Mat gram = phi * phi.transpose();
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw NumericalError(
          "row orthonormalization failed: gaussian draw is rank deficient");
    }
    phi = llt.matrixL().solve(phi);
    const double err =
        (phi * phi.transpose() - Mat::Identity(phi.rows(), phi.rows()))
            .cwiseAbs()
            .maxCoeff();
    if (err <= 1e-12) return;
  }
  throw NumericalError("row orthonormalization did not converge");
}

}  // namespace

ObservationMatrix make_observation_matrix(Eigen::Index n, double mr,
                                          std::uint64_t seed,
                                          MatrixKind kind) {
  if (n < 2) throw ParameterError("make_observation_matrix: n must be >= 2");
  if (!(mr > 0.0) || mr > 1.0) {
    throw ParameterError("make_observation_matrix: mr must be in (0, 1]");
  }
  const auto m = static_cast<Eigen::Index>(std::llround(mr * static_cast<double>(n)));
  if (m < 1) throw ParameterError("make_observation_matrix: round(mr*n) < 1");

  ObservationMatrix out;
  out.seed = seed;
  out.mr = mr;
  out.kind = kind;

  if (kind == MatrixKind::identity) {
    if (m != n) {
      throw ParameterError("identity observation matrix requires mr = 1");
    }
    out.entries = Mat::Identity(n, n);
    return out;
  }

  Rng rng(derive_seed(seed, 0x0b5e));
  out.entries.resize(m, n);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.entries(i, j) = rng.gaussian(0.0, sigma);
    }
  }
  if (kind == MatrixKind::row_orthonormal_gaussian) {
    orthonormalize_rows(out.entries);
  }
  return out;
}

CompressedTrace compress(const ObservationMatrix& matrix, const Trace& trace) {
  trace.validate();
  if (trace.size() != matrix.n()) {
    throw ParameterError("compress: trace length != matrix cols");
  }
  CompressedTrace out;
  out.samples = matrix.entries * trace.samples;
  out.source_n = matrix.n();
  out.matrix_id = matrix.id();
  out.modality = trace.modality;
  return out;
}

Mat compress_columns(const ObservationMatrix& matrix, const Mat& columns) {
  if (columns.rows() != matrix.n()) {
    throw ParameterError("compress_columns: window length != matrix cols");
  }
  return matrix.entries * columns;
}

CVec dft_coefficients(const Trace& trace) {
  trace.validate();
  return fft_unitary(trace.samples);
}

SparsityProfile sparsity_profile(const Trace& trace,
                                 const std::vector<double>& fractions) {
  const CVec coeffs = dft_coefficients(trace);
  Vec mags = coeffs.cwiseAbs();
  const double peak = mags.maxCoeff();
  if (peak <= 0.0) {
    throw DegenerateInputError("sparsity_profile: all-zero trace");
  }
  for (double f : fractions) {
    if (!(f > 0.0) || f >= 1.0) {
      throw ParameterError("sparsity_profile: fractions must be in (0, 1)");
    }
  }
  std::sort(mags.data(), mags.data() + mags.size(), std::greater<double>());
  mags /= peak;

  SparsityProfile out;
  out.sorted_magnitudes = mags;
  for (double f : fractions) {
    // First index at or below the fraction == count of coefficients above it.
    const auto* begin = mags.data();
    const auto* it = std::lower_bound(begin, begin + mags.size(), f,
                                      std::greater<double>());
    out.k_at_fraction[f] = it - begin;
  }
  return out;
}

}  // namespace csdas
