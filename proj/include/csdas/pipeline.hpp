#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "csdas/classification.hpp"
#include "csdas/detection.hpp"
#include "csdas/reconstruction.hpp"

namespace csdas {

struct BankConfig {
  int n_bands = 50;
  double band_width_hz = 30.0;
  int taps = 1023;
  double window_s = 0.8;
};

struct DetectionConfig {
  double fraction = 0.8;
  double grid_lo = 0.5;
  double grid_hi = 10.0;
  double grid_step = 0.05;
  ThresholdMode mode = ThresholdMode::per_band;

  std::vector<double> multiplier_grid() const;
};

struct StageTwoConfig {
  SvmParams svm;
  int folds = 5;
  int n_aug = 9;       // augmented copies per training clip
  int en_fill = 40;    // EN target when Stage-I yields < 20 false alarms
  bool phase_only_ablation = true;
};

struct SweepConfig {
  std::vector<double> mr_grid = {0.02, 0.04, 0.08, 0.16};
  std::vector<int> k_grid = {6, 10, 16, 24};
};

struct BenchConfig {
  int windows = 20;
  int k = 24;
};

struct RunConfig {
  std::string dataset_dir;  // empty: synthesize `dataset` in memory
  std::string template_file;  // optional override of dataset.templates
  DatasetSpec dataset;
  double mr = 0.3;
  std::uint64_t matrix_seed = 7;
  MatrixKind matrix_kind = MatrixKind::row_orthonormal_gaussian;
  BankConfig bank;
  DetectionConfig detection;
  StageTwoConfig stage2;
  SweepConfig sweep;
  BenchConfig bench;
  std::uint64_t run_seed = 1;
  std::string out_dir = "out";
};

struct DomainReport {
  Domain domain = Domain::nyquist;
  RocCurve roc;
  RocPoint operating_point;
  ConfusionMatrix confusion;
  double overall_accuracy = 0.0;
  double event_accuracy = 0.0;       // four event classes only
  double phase_only_accuracy = 0.0;  // 50-dim ablation (when enabled)
  long en_false_alarms = 0;
  long en_fill = 0;
  long stage2_samples = 0;
  long alarmed_channels = 0;  // (clip, channel) cells with >= 1 fired window
  bool svm_converged = true;
};

struct RunReport {
  DomainReport nyquist;
  DomainReport compressed;
  double reduction_ratio = 0.0;  // 1 - mr
  std::vector<std::pair<std::string, double>> timings;
};

/// Full two-domain run: features, Stage-I ROC + operating point, Stage-II
/// cross-validated classification; writes roc_*.csv, confusion_*.csv,
/// features_*.csv, report, manifest and timings.csv into out_dir.
RunReport run_pipeline(const RunConfig& config);

/// Synthesizes and persists the configured dataset.
void run_generate(const RunConfig& config,
                  const std::filesystem::path& target_dir);

/// Reconstruction sweep on one clip window; writes sweep.csv into out_dir.
std::vector<SweepCell> run_sweep(const RunConfig& config);

struct BenchResult {
  int windows = 0;
  int k = 0;
  double mean_reconstruct_fbe_s = 0.0;
  double mean_cfbe_s = 0.0;
  double speedup = 0.0;
};

/// Times OMP-reconstruct-then-FBE against direct C-FBE on compressed
/// windows; writes bench.csv into out_dir.
BenchResult run_bench(const RunConfig& config);

/// Key = value echo of the configuration, readable back through the CLI's
/// --config option.
void write_manifest(const RunConfig& config,
                    const std::filesystem::path& path);

// Pieces reused by the stage-wise CLI subcommands and the acceptance suite.

struct PipelineContext {
  DatasetSpec spec;
  Dataset clips;
  FilterBank bank;
  ObservationMatrix matrix;
  CompressedFilterBank cbank;
  std::vector<ClipFeatures> features;  // aligned with clips
};

/// Loads (or synthesizes) the dataset and extracts features in both domains.
PipelineContext prepare_context(const RunConfig& config);

struct DomainRun {
  DomainReport report;
  BaselineStats baseline;
  std::vector<StackedFeature> stage2;  // base + augmented samples
};

/// Stage-I + Stage-II for one domain on a prepared context.
DomainRun run_domain(const PipelineContext& ctx, Domain domain,
                     const RunConfig& config);

}  // namespace csdas
