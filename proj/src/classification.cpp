#include "csdas/classification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "csdas/csv.hpp"
#include "csdas/fft.hpp"
#include "csdas/rng.hpp"

namespace csdas {

StackedFeature normalize_concat(const FeatureVector& phase,
                                const FeatureVector& intensity) {
  if (phase.band_energies.size() != intensity.band_energies.size()) {
    throw ParameterError("normalize_concat: band count mismatch");
  }
  if (phase.domain != intensity.domain || phase.channel != intensity.channel ||
      phase.window_index != intensity.window_index) {
    throw ParameterError("normalize_concat: features from different cells");
  }
  if (phase.modality != Modality::phase ||
      intensity.modality != Modality::intensity) {
    throw ParameterError("normalize_concat: expected a phase,intensity pair");
  }
  const auto nb = phase.band_energies.size();
  StackedFeature out;
  out.values.resize(2 * nb);
  const double pmax = phase.band_energies.maxCoeff();
  const double imax = intensity.band_energies.maxCoeff();
  out.values.head(nb) =
      pmax > 0.0 ? (phase.band_energies / pmax).eval() : phase.band_energies;
  out.values.tail(nb) = imax > 0.0 ? (intensity.band_energies / imax).eval()
                                   : intensity.band_energies;
  out.domain = phase.domain;
  out.channel = phase.channel;
  out.window_index = phase.window_index;
  return out;
}

AugmentChoice draw_augment_choice(std::uint64_t seed, int copy_index) {
  Rng rng(derive_seed(seed, 0xa06 + copy_index));
  AugmentChoice choice;
  switch (rng.uniform_int(3)) {
    case 0:
      choice.method = AugmentMethod::time_shift;
      choice.factor = rng.uniform(-0.5, 0.5);
      break;
    case 1:
      choice.method = AugmentMethod::speed_stretch;
      choice.factor = rng.uniform(0.9, 1.1);
      break;
    default:
      choice.method = AugmentMethod::pitch_change;
      choice.factor = rng.uniform(0.9, 1.1);
      break;
  }
  return choice;
}

namespace {

Vec time_shift(const Vec& x, double shift_s, double fs) {
  const auto n = x.size();
  long s = std::lround(shift_s * fs) % n;
  if (s < 0) s += n;
  Vec out(n);
  out.tail(n - s) = x.head(n - s);
  out.head(s) = x.tail(s);
  return out;
}

Vec speed_stretch(const Vec& x, double factor) {
  const auto n = x.size();
  Vec out = Vec::Zero(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double pos = m * factor;
    const auto i = static_cast<Eigen::Index>(pos);
    if (i + 1 >= n) break;  // shorter output is zero-padded
    const double frac = pos - static_cast<double>(i);
    out[m] = (1.0 - frac) * x[i] + frac * x[i + 1];
  }
  return out;
}

Vec pitch_change(const Vec& x, double factor) {
  // Scale the frequency axis by `factor` without touching duration:
  // X'(k) = X(k / factor) by linear interpolation over the positive bins,
  // completed hermitian so the output stays real.
  const auto n = x.size();
  const CVec spec = fft_unitary(x);
  CVec out = CVec::Zero(n);
  const Eigen::Index half = n / 2;
  for (Eigen::Index k = 0; k <= half; ++k) {
    const double pos = static_cast<double>(k) / factor;
    const auto i = static_cast<Eigen::Index>(pos);
    if (i + 1 > half) break;
    const double frac = pos - static_cast<double>(i);
    out[k] = (1.0 - frac) * spec[i] +
             frac * spec[std::min<Eigen::Index>(i + 1, half)];
  }
  for (Eigen::Index k = 1; k < n - half; ++k) {
    out[n - k] = std::conj(out[k]);
  }
  return ifft_unitary_real(out);
}

}  // namespace

Vec apply_augment(const Vec& samples, double sample_rate_hz,
                  const AugmentChoice& choice) {
  switch (choice.method) {
    case AugmentMethod::time_shift:
      return time_shift(samples, choice.factor, sample_rate_hz);
    case AugmentMethod::speed_stretch:
      return speed_stretch(samples, choice.factor);
    case AugmentMethod::pitch_change:
      return pitch_change(samples, choice.factor);
  }
  throw ParameterError("apply_augment: unknown method");
}

std::vector<LabeledClip> augment(const LabeledClip& clip, int n_copies,
                                 std::uint64_t seed) {
  if (n_copies < 1) {
    throw ParameterError("augment: n_copies must be >= 1");
  }
  std::vector<LabeledClip> out;
  out.reserve(n_copies);
  for (int copy = 0; copy < n_copies; ++copy) {
    const AugmentChoice choice = draw_augment_choice(seed, copy);
    LabeledClip aug = clip;
    aug.clip_id = clip.clip_id + "-aug" + std::to_string(copy);
    for (int ch = 0; ch < clip.channel_count(); ++ch) {
      aug.phase[ch].samples =
          apply_augment(clip.phase[ch].samples, clip.sample_rate_hz, choice);
      aug.intensity[ch].samples = apply_augment(
          clip.intensity[ch].samples, clip.sample_rate_hz, choice);
    }
    out.push_back(std::move(aug));
  }
  return out;
}

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts) {
    for (long v : row) t += v;
  }
  return t;
}

long ConfusionMatrix::trace() const {
  long t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

double ConfusionMatrix::overall_accuracy() const {
  const long t = total();
  return t == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(t);
}

namespace {

std::size_t class_index(const ConfusionMatrix& cm, ClassLabel label) {
  for (std::size_t i = 0; i < cm.class_order.size(); ++i) {
    if (cm.class_order[i] == label) return i;
  }
  throw ParameterError("confusion matrix: label not in class order");
}

}  // namespace

long& ConfusionMatrix::at(ClassLabel truth, ClassLabel predicted) {
  return counts[class_index(*this, truth)][class_index(*this, predicted)];
}

long ConfusionMatrix::at(ClassLabel truth, ClassLabel predicted) const {
  return counts[class_index(*this, truth)][class_index(*this, predicted)];
}

double four_class_accuracy(const ConfusionMatrix& cm) {
  long correct = 0, total = 0;
  for (std::size_t r = 0; r < cm.class_order.size(); ++r) {
    if (cm.class_order[r] == ClassLabel::EN) continue;
    for (long v : cm.counts[r]) total += v;
    correct += cm.counts[r][r];
  }
  if (total == 0) return 0.0;
  return static_cast<double>(correct) / static_cast<double>(total);
}

void write_confusion_csv(const std::filesystem::path& path,
                         const ConfusionMatrix& cm) {
  CsvWriter csv(path);
  std::vector<std::string> header = {"class"};
  for (ClassLabel c : cm.class_order) header.emplace_back(to_string(c));
  csv.write_row(header);
  for (std::size_t r = 0; r < cm.class_order.size(); ++r) {
    csv.begin_row();
    csv.field(to_string(cm.class_order[r]));
    for (long v : cm.counts[r]) csv.field(v);
    csv.end_row();
  }
}

CvResult cross_validate(const std::vector<StackedFeature>& dataset,
                        const CvOptions& options) {
  if (options.folds < 2) {
    throw ParameterError("cross_validate: folds must be >= 2");
  }
  if (dataset.empty()) {
    throw ParameterError("cross_validate: empty dataset");
  }

  // Clip -> stratification label (first non-EN label seen, else EN).
  std::map<std::string, ClassLabel> clip_strat;
  for (const auto& f : dataset) {
    if (f.source_clip_id.empty()) {
      throw ParameterError("cross_validate: feature without source clip id");
    }
    auto [it, inserted] = clip_strat.emplace(f.source_clip_id, f.label);
    if (!inserted && it->second == ClassLabel::EN) {
      it->second = f.label;
    }
  }

  // Seeded shuffle within each stratification class, then round-robin.
  std::map<ClassLabel, std::vector<std::string>> by_class;
  for (const auto& [clip, strat] : clip_strat) {
    by_class[strat].push_back(clip);  // map iteration == sorted clip ids
  }
  std::map<std::string, int> clip_fold;
  for (auto& [strat, clips] : by_class) {
    Rng rng(derive_seed(options.seed, 0xf01d + static_cast<int>(strat)));
    for (std::size_t i = clips.size(); i > 1; --i) {
      std::swap(clips[i - 1], clips[rng.uniform_int(i)]);
    }
    if (clips.size() < static_cast<std::size_t>(options.folds)) {
      throw ParameterError(
          std::string("cross_validate: class ") + to_string(strat) +
          " has fewer clips than folds");
    }
    for (std::size_t i = 0; i < clips.size(); ++i) {
      clip_fold[clips[i]] = static_cast<int>(i % options.folds);
    }
  }

  const Eigen::Index dims =
      options.feature_cols > 0 ? options.feature_cols
                               : dataset.front().values.size();

  CvResult result;
  for (int fold = 0; fold < options.folds; ++fold) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const int f = clip_fold.at(dataset[i].source_clip_id);
      if (f == fold) {
        if (!dataset[i].augmented) test_rows.push_back(i);
      } else {
        train_rows.push_back(i);
      }
    }
    if (test_rows.empty()) continue;

    Mat xtrain(train_rows.size(), dims);
    std::vector<int> ytrain(train_rows.size());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      xtrain.row(r) = dataset[train_rows[r]].values.head(dims).transpose();
      ytrain[r] = static_cast<int>(dataset[train_rows[r]].label);
    }
    const SvmModel model = train_svm(xtrain, ytrain, options.svm);
    if (!model.converged) result.converged = false;

    for (Eigen::Index row : test_rows) {
      const int pred =
          model.predict(Vec(dataset[row].values.head(dims)));
      result.confusion.at(dataset[row].label,
                          static_cast<ClassLabel>(pred))++;
    }
  }
  result.accuracy = result.confusion.overall_accuracy();
  return result;
}

}  // namespace csdas
