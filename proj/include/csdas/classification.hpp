#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "csdas/datagen.hpp"
#include "csdas/features.hpp"
#include "csdas/svm.hpp"
#include "csdas/types.hpp"

namespace csdas {

/// 1 x 100 classifier input: max-normalized phase block (0..49) followed by
/// max-normalized intensity block (50..99).
struct StackedFeature {
  Vec values;
  ClassLabel label = ClassLabel::EN;
  Domain domain = Domain::nyquist;
  std::string source_clip_id;
  int channel = 0;
  int window_index = 0;
  bool augmented = false;
};

/// Each 50-block divided by its own maximum (all-zero blocks pass through).
StackedFeature normalize_concat(const FeatureVector& phase,
                                const FeatureVector& intensity);

enum class AugmentMethod { time_shift, speed_stretch, pitch_change };

/// One voice of the augmentation: same method and factor applied to both
/// modalities of every channel.
struct AugmentChoice {
  AugmentMethod method = AugmentMethod::time_shift;
  double factor = 0.0;  // seconds for shift, resampling ratio otherwise
};

AugmentChoice draw_augment_choice(std::uint64_t seed, int copy_index);

/// Applies one augmentation voice to a single trace.
Vec apply_augment(const Vec& samples, double sample_rate_hz,
                  const AugmentChoice& choice);

/// n_copies perturbed copies of the clip (the original is not included):
/// circular time shift within +/-0.5 s, speed stretch by a [0.9, 1.1]
/// resampling factor (padded/trimmed back), or pitch change by scaling the
/// frequency axis with duration preserved. Method and factor are drawn per
/// copy from `seed` and shared by all channels and both modalities.
std::vector<LabeledClip> augment(const LabeledClip& clip, int n_copies,
                                 std::uint64_t seed);

struct ConfusionMatrix {
  std::array<std::array<long, 5>, 5> counts{};  // rows truth, cols predicted
  std::array<ClassLabel, 5> class_order = {ClassLabel::TH, ClassLabel::WD,
                                           ClassLabel::JH, ClassLabel::SH,
                                           ClassLabel::EN};

  long total() const;
  long trace() const;
  double overall_accuracy() const;
  long& at(ClassLabel truth, ClassLabel predicted);
  long at(ClassLabel truth, ClassLabel predicted) const;
};

/// Accuracy over the four event rows only; event windows predicted as EN
/// still count as errors.
double four_class_accuracy(const ConfusionMatrix& cm);

void write_confusion_csv(const std::filesystem::path& path,
                         const ConfusionMatrix& cm);

struct CvResult {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  bool converged = true;
};

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  SvmParams svm;
  /// Use only the first `feature_cols` entries of each vector (0 = all);
  /// 50 gives the phase-only ablation.
  int feature_cols = 0;
};

/// Stratified clip-grouped cross-validation. Folds are assigned to source
/// clips (seeded, deterministic), so augmented copies always land in the
/// fold of their source clip and are used for training only; originals in
/// the held-out fold are the test set.
CvResult cross_validate(const std::vector<StackedFeature>& dataset,
                        const CvOptions& options);

}  // namespace csdas
