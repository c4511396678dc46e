#pragma once

#include <filesystem>
#include <vector>

#include "csdas/features.hpp"
#include "csdas/types.hpp"

namespace csdas {

/// Per-band mean energy of vibration-free windows; the reference the
/// threshold multiplier scales.
struct BaselineStats {
  Vec per_band_mean;
  Domain domain = Domain::nyquist;
  int n_windows = 0;

  double scalar_mean() const { return per_band_mean.mean(); }
};

struct DetectionDecision {
  int channel = 0;
  int window_index = 0;
  bool is_vibration = false;
  double fraction_above = 0.0;
};

/// Threshold mode: per-band multiplies each band's own quiet mean; scalar
/// multiplies the grand mean of all bands (sensitivity-analysis variant).
enum class ThresholdMode { per_band, scalar };

BaselineStats baseline_stats(const std::vector<FeatureVector>& quiet_features);

/// Band i fires when energy_i > multiplier * reference_i; the window is a
/// vibration when at least `fraction` of the bands fire (boundary inclusive).
DetectionDecision detect(const FeatureVector& features,
                         const BaselineStats& baseline, double multiplier,
                         double fraction = 0.8,
                         ThresholdMode mode = ThresholdMode::per_band);

struct RocPoint {
  double multiplier = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // sorted by multiplier
  double auc = 0.0;
};

struct LabeledFeature {
  FeatureVector features;
  bool truth = false;
};

/// TPR/FPR per multiplier plus trapezoidal AUC over (FPR, TPR) with (0,0)
/// and (1,1) appended when absent. Multipliers must be ascending and the
/// labels must contain both classes.
RocCurve roc_sweep(const std::vector<LabeledFeature>& labeled,
                   const BaselineStats& baseline,
                   const std::vector<double>& multipliers,
                   double fraction = 0.8,
                   ThresholdMode mode = ThresholdMode::per_band);

/// Operating point closest to (FPR, TPR) = (0, 1); ties break toward the
/// smaller multiplier.
RocPoint pick_operating_point(const RocCurve& curve);

/// Default multiplier grid 0.5 .. 10.0 step 0.05 (brackets both stated
/// operating thresholds with margin).
std::vector<double> default_multiplier_grid();

/// CSV with header `multiplier,tpr,fpr`.
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

}  // namespace csdas
