#pragma once

#include <filesystem>
#include <vector>

#include "csdas/types.hpp"

namespace csdas {

enum class SvmKernel { rbf, linear };

struct SvmParams {
  SvmKernel kernel = SvmKernel::rbf;
  double c = 10.0;
  /// <= 0 resolves to 1 / (n_features * mean per-feature variance).
  double gamma = 0.0;
  double tol = 1e-3;
  long max_iter = 100000;
};

/// One binary max-margin subproblem of the one-vs-one decomposition.
/// decision(x) > 0 votes for class_a.
struct BinarySvm {
  int class_a = 0;
  int class_b = 0;
  Mat support_vectors;  // one row per SV
  Vec dual_coefs;       // alpha_i * y_i, in [-C, C]
  double bias = 0.0;
};

/// One-vs-one multiclass SVM: one binary model per unordered class pair,
/// prediction by pairwise voting with ties broken by summed margins.
struct SvmModel {
  SvmParams params;
  double gamma = 0.0;           // resolved value actually used
  std::vector<int> class_ids;   // ordered list of distinct labels
  std::vector<BinarySvm> pairs;
  bool converged = true;        // false when any pair hit max_iter

  double decision(const BinarySvm& pair, const Vec& x) const;
  int predict(const Vec& x) const;
  std::vector<int> predict(const Mat& x_rows) const;
};

/// Trains with SMO (maximal-violating-pair working-set selection, analytic
/// two-variable updates, full kernel matrix per pair). Deterministic given
/// data order and params.
SvmModel train_svm(const Mat& x_rows, const std::vector<int>& labels,
                   const SvmParams& params);

/// Flat file: text header (kernel, C, gamma, tol, class ids, dims, pair
/// count), then per pair a `pair a b n_sv` line followed by raw
/// little-endian 64-bit floats: support vectors row-major, dual
/// coefficients, bias.
void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace csdas
