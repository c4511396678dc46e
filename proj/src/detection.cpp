#include "csdas/detection.hpp"

#include <algorithm>
#include <cmath>

#include "csdas/csv.hpp"

namespace csdas {

BaselineStats baseline_stats(const std::vector<FeatureVector>& quiet_features) {
  if (quiet_features.empty()) {
    throw ParameterError("baseline_stats: no quiet windows given");
  }
  const auto& first = quiet_features.front();
  Vec sum = Vec::Zero(first.band_energies.size());
  for (const auto& f : quiet_features) {
    if (f.domain != first.domain || f.modality != first.modality) {
      throw ParameterError("baseline_stats: mixed domains or modalities");
    }
    if (f.band_energies.size() != sum.size()) {
      throw ParameterError("baseline_stats: mixed band counts");
    }
    sum += f.band_energies;
  }
  BaselineStats out;
  out.per_band_mean = sum / static_cast<double>(quiet_features.size());
  out.domain = first.domain;
  out.n_windows = static_cast<int>(quiet_features.size());
  return out;
}

DetectionDecision detect(const FeatureVector& features,
                         const BaselineStats& baseline, double multiplier,
                         double fraction, ThresholdMode mode) {
  if (features.domain != baseline.domain) {
    throw ParameterError("detect: feature/baseline domain mismatch");
  }
  if (features.band_energies.size() != baseline.per_band_mean.size()) {
    throw ParameterError("detect: band count mismatch");
  }
  if (!(multiplier > 0.0)) {
    throw ParameterError("detect: multiplier must be positive");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ParameterError("detect: fraction must be in (0, 1]");
  }

  const auto nb = features.band_energies.size();
  Eigen::Index above = 0;
  const double grand = baseline.scalar_mean();
  for (Eigen::Index i = 0; i < nb; ++i) {
    const double ref =
        mode == ThresholdMode::per_band ? baseline.per_band_mean[i] : grand;
    if (features.band_energies[i] > multiplier * ref) ++above;
  }

  DetectionDecision out;
  out.channel = features.channel;
  out.window_index = features.window_index;
  out.fraction_above =
      static_cast<double>(above) / static_cast<double>(nb);
  out.is_vibration = out.fraction_above >= fraction;
  return out;
}

namespace {

double trapezoid_auc(std::vector<std::pair<double, double>> pts) {
  // (fpr, tpr) pairs; anchor the curve at (0,0) and (1,1).
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auc += (pts[i].first - pts[i - 1].first) *
           (pts[i].second + pts[i - 1].second) / 2.0;
  }
  return auc;
}

}  // namespace

RocCurve roc_sweep(const std::vector<LabeledFeature>& labeled,
                   const BaselineStats& baseline,
                   const std::vector<double>& multipliers, double fraction,
                   ThresholdMode mode) {
  if (multipliers.empty()) {
    throw ParameterError("roc_sweep: empty multiplier grid");
  }
  if (!std::is_sorted(multipliers.begin(), multipliers.end())) {
    throw ParameterError("roc_sweep: multipliers must be ascending");
  }
  long n_pos = 0, n_neg = 0;
  for (const auto& lf : labeled) {
    (lf.truth ? n_pos : n_neg)++;
  }
  if (n_pos == 0 || n_neg == 0) {
    throw ParameterError("roc_sweep: need at least one positive and one "
                         "negative window");
  }

  RocCurve curve;
  std::vector<std::pair<double, double>> pts;
  for (double m : multipliers) {
    long tp = 0, fp = 0;
    for (const auto& lf : labeled) {
      const bool fired =
          detect(lf.features, baseline, m, fraction, mode).is_vibration;
      if (fired) {
        (lf.truth ? tp : fp)++;
      }
    }
    RocPoint p;
    p.multiplier = m;
    p.tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
    p.fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
    curve.points.push_back(p);
    pts.emplace_back(p.fpr, p.tpr);
  }
  curve.auc = trapezoid_auc(std::move(pts));
  return curve;
}

RocPoint pick_operating_point(const RocCurve& curve) {
  if (curve.points.empty()) {
    throw ParameterError("pick_operating_point: empty curve");
  }
  const RocPoint* best = &curve.points.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : curve.points) {
    const double d = std::hypot(p.fpr, 1.0 - p.tpr);
    if (d < best_d) {  // strict: ties keep the earlier (smaller) multiplier
      best_d = d;
      best = &p;
    }
  }
  return *best;
}

std::vector<double> default_multiplier_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 190; ++i) {
    grid.push_back(0.5 + 0.05 * i);
  }
  return grid;
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  CsvWriter csv(path);
  csv.write_row({"multiplier", "tpr", "fpr"});
  for (const auto& p : curve.points) {
    csv.begin_row();
    csv.field(p.multiplier).field(p.tpr).field(p.fpr);
    csv.end_row();
  }
}

}  // namespace csdas
