#include "csdas/reconstruction.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "csdas/csv.hpp"
#include "csdas/fft.hpp"
#include "csdas/rng.hpp"

namespace csdas {

double pearson_correlation(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw ParameterError("pearson_correlation: length mismatch");
  }
  if (a.size() < 2) {
    throw ParameterError("pearson_correlation: need at least 2 samples");
  }
  const Vec da = a.array() - a.mean();
  const Vec db = b.array() - b.mean();
  const double va = da.squaredNorm();
  const double vb = db.squaredNorm();
  if (va <= 0.0 || vb <= 0.0) {
    throw DegenerateInputError("pearson_correlation: constant input");
  }
  return da.dot(db) / std::sqrt(va * vb);
}

ReconstructionResult omp_reconstruct(const CompressedTrace& y,
                                     const ObservationMatrix& matrix, int k,
                                     const Trace* reference) {
  const auto m = matrix.m();
  const auto n = matrix.n();
  if (y.size() != m) {
    throw ParameterError("omp_reconstruct: y length != matrix rows");
  }
  if (k < 1 || k > m) {
    throw ParameterError("omp_reconstruct: need 1 <= k <= M");
  }
  if (reference != nullptr && reference->size() != n) {
    throw ParameterError("omp_reconstruct: reference length != N");
  }

  const auto t_start = std::chrono::steady_clock::now();

  const CVec yc = y.samples.cast<std::complex<double>>();
  CVec residual = yc;
  CMat q(m, k);          // orthonormal basis of the selected atoms
  CMat r_upper = CMat::Zero(k, k);
  CVec qty(k);           // Q^H y, grown with each atom
  std::vector<int> selected;
  std::vector<char> used(n, 0);
  std::vector<double> residual_norms;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  for (int it = 0; it < k; ++it) {
    // Correlations D^H r = unitary DFT of phi^T r, split into two real GEMVs.
    CVec z(n);
    z.real() = matrix.entries.transpose() * residual.real();
    z.imag() = matrix.entries.transpose() * residual.imag();
    const CVec corr = fft_unitary(z);

    int best = -1;
    double best_mag = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double mag = std::abs(corr[j]);
      if (mag > best_mag) {
        best_mag = mag;
        best = static_cast<int>(j);
      }
    }
    used[best] = 1;
    selected.push_back(best);

    // Atom: phi times DFT synthesis column `best`.
    Vec cos_col(n), sin_col(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double angle = 2.0 * M_PI * static_cast<double>(i) *
                           static_cast<double>(best) / static_cast<double>(n);
      cos_col[i] = std::cos(angle) * inv_sqrt_n;
      sin_col[i] = std::sin(angle) * inv_sqrt_n;
    }
    CVec atom(m);
    atom.real() = matrix.entries * cos_col;
    atom.imag() = matrix.entries * sin_col;

    // Modified Gram-Schmidt extension of the QR factorization.
    const double atom_norm = atom.norm();
    CVec v = atom;
    for (int c = 0; c < it; ++c) {
      const std::complex<double> h = q.col(c).dot(v);  // conjugated dot
      r_upper(c, it) = h;
      v -= h * q.col(c);
    }
    const double diag = v.norm();
    if (diag <= 1e-12 * std::max(atom_norm, 1e-300)) {
      std::ostringstream os;
      os << "omp_reconstruct: singular least-squares subproblem at iteration "
         << it;
      throw NumericalError(os.str());
    }
    r_upper(it, it) = diag;
    q.col(it) = v / diag;
    qty[it] = q.col(it).dot(yc);

    residual = yc - q.leftCols(it + 1) * qty.head(it + 1);
    residual_norms.push_back(residual.norm());
  }

  // Back substitution R s = Q^H y, then synthesis.
  CVec coeffs = qty;
  for (int i = k - 1; i >= 0; --i) {
    for (int j = i + 1; j < k; ++j) {
      coeffs[i] -= r_upper(i, j) * coeffs[j];
    }
    coeffs[i] /= r_upper(i, i);
  }
  CVec spectrum = CVec::Zero(n);
  for (int i = 0; i < k; ++i) {
    spectrum[selected[i]] = coeffs[i];
  }
  const Vec xhat = ifft_unitary_real(spectrum);

  const auto t_end = std::chrono::steady_clock::now();

  ReconstructionResult result;
  result.reconstructed.samples = xhat;
  result.reconstructed.sample_rate_hz =
      reference != nullptr ? reference->sample_rate_hz : 1.0;
  result.reconstructed.modality = y.modality;
  result.k_used = k;
  result.mr = matrix.mr;
  result.wall_time_s =
      std::chrono::duration<double>(t_end - t_start).count();
  if (reference != nullptr) {
    result.pcc = pearson_correlation(reference->samples, xhat);
  }
  result.selected_atoms = std::move(selected);
  result.residual_norms = std::move(residual_norms);
  return result;
}

std::vector<SweepCell> sweep_reconstruction(const Trace& trace,
                                            const std::vector<double>& mr_grid,
                                            const std::vector<int>& k_grid,
                                            std::uint64_t seed) {
  trace.validate();
  if (mr_grid.empty() || k_grid.empty()) {
    throw ParameterError("sweep_reconstruction: empty grid");
  }
  for (double mr : mr_grid) {
    if (!(mr > 0.0) || mr > 1.0) {
      throw ParameterError("sweep_reconstruction: mr must be in (0, 1]");
    }
  }
  for (int k : k_grid) {
    if (k < 1) throw ParameterError("sweep_reconstruction: k must be >= 1");
  }

  std::vector<SweepCell> cells;
  for (std::size_t i = 0; i < mr_grid.size(); ++i) {
    const auto matrix = make_observation_matrix(
        trace.size(), mr_grid[i], derive_seed(seed, i),
        MatrixKind::row_orthonormal_gaussian);
    const CompressedTrace y = compress(matrix, trace);
    for (int k : k_grid) {
      SweepCell cell;
      cell.mr = mr_grid[i];
      cell.k = k;
      try {
        const auto res = omp_reconstruct(y, matrix, k, &trace);
        cell.pcc = *res.pcc;
        cell.wall_time_s = res.wall_time_s;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepCell>& cells) {
  CsvWriter csv(path);
  csv.write_row({"mr", "k", "pcc", "wall_time_s", "status"});
  for (const auto& c : cells) {
    csv.begin_row();
    csv.field(c.mr).field(c.k);
    if (c.ok) {
      csv.field(c.pcc).field(c.wall_time_s).field("ok");
    } else {
      csv.field("").field("").field("failed");
    }
    csv.end_row();
  }
}

}  // namespace csdas
