#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csdas/sensing.hpp"
#include "csdas/types.hpp"

namespace csdas {

struct ReconstructionResult {
  Trace reconstructed;
  int k_used = 0;
  double mr = 0.0;
  std::optional<double> pcc;  // set when a reference trace was supplied
  double wall_time_s = 0.0;
  // Diagnostics: greedy selection order and residual norm after each step.
  std::vector<int> selected_atoms;
  std::vector<double> residual_norms;
};

/// Sample Pearson correlation coefficient. Throws DegenerateInputError when
/// either sequence has zero variance.
double pearson_correlation(const Vec& a, const Vec& b);

/// Greedy OMP over the dictionary phi * Psi (Psi = inverse unitary DFT
/// synthesis basis), run matrix-free: correlations via one FFT of phi^T r,
/// atoms generated on demand, least squares via an incrementally updated
/// QR (modified Gram-Schmidt). Stops after exactly k iterations; the final
/// estimate is Re(Psi s_hat). Wall time covers the algorithm only.
ReconstructionResult omp_reconstruct(const CompressedTrace& y,
                                     const ObservationMatrix& matrix, int k,
                                     const Trace* reference = nullptr);

struct SweepCell {
  double mr = 0.0;
  int k = 0;
  double pcc = 0.0;
  double wall_time_s = 0.0;
  bool ok = false;
  std::string error;
};

/// One row-orthonormal matrix per mr value (seeds derived from `seed`),
/// one OMP run per (mr, k) pair; failed cells are recorded, not fatal.
/// Rows come out in (mr, k) grid order.
std::vector<SweepCell> sweep_reconstruction(const Trace& trace,
                                            const std::vector<double>& mr_grid,
                                            const std::vector<int>& k_grid,
                                            std::uint64_t seed);

/// CSV with header `mr,k,pcc,wall_time_s,status`.
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepCell>& cells);

}  // namespace csdas
