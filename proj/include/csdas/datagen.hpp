#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csdas/types.hpp"

namespace csdas {

/// Event classes plus EN, the environmental-noise class. Quiet clips carry
/// the EN label: they are the source of non-event training windows.
enum class ClassLabel { TH, WD, JH, SH, EN };

inline constexpr ClassLabel kEventClasses[] = {ClassLabel::TH, ClassLabel::WD,
                                               ClassLabel::JH, ClassLabel::SH};

const char* to_string(ClassLabel label);
ClassLabel class_label_from_string(const std::string& s);

/// Multi-channel recording of one event (or of background noise), the unit
/// of dataset storage. Channel data is stored channel-major.
struct LabeledClip {
  std::string clip_id;
  ClassLabel label = ClassLabel::EN;
  std::vector<Trace> phase;      // one per channel
  std::vector<Trace> intensity;  // one per channel
  std::optional<int> vibration_channel;
  double duration_s = 0.0;
  double sample_rate_hz = 0.0;
  std::uint64_t clip_seed = 0;

  int channel_count() const { return static_cast<int>(phase.size()); }
  Eigen::Index samples_per_channel() const {
    return phase.empty() ? 0 : phase.front().size();
  }
};

/// Spectral shape of each class template. The defaults reproduce the
/// built-in soundtracks; a key = value file can retune any of them (see
/// load_template_params), so the event spectra are data, not code.
struct TemplateParams {
  // Broadband coupling floor added under every event.
  double floor_amplitude = 0.3;
  double floor_lowpass_hz = 1600.0;
  // Intensity channel = this fraction of the phase signal plus own noise.
  double intensity_scale = 0.5;
  // TH: low-passed noise with slow amplitude modulation.
  double th_lowpass_hz = 280.0;
  double th_am_lo_hz = 0.3;
  double th_am_hi_hz = 0.8;
  // WD: harmonic series on a fundamental.
  double wd_f0_lo_hz = 100.0;
  double wd_f0_hi_hz = 150.0;
  int wd_partials = 10;
  double wd_amp_exponent = 0.7;
  double wd_am_lo_hz = 2.0;
  double wd_am_hi_hz = 5.0;
  // JH: periodic broadband bursts.
  double jh_rate_lo_hz = 8.0;
  double jh_rate_hi_hz = 15.0;
  double jh_burst_s = 0.05;
  double jh_decay_s = 0.02;
  double jh_lowpass_hz = 1500.0;
  // SH: sparse decaying transients.
  int sh_bursts_per_window = 2;
  double sh_burst_s = 0.25;
  double sh_decay_s = 0.06;
  double sh_lowpass_hz = 1200.0;
};

/// Reads `key = value` lines (# comments allowed) over the defaults;
/// unknown keys are format errors so typos do not silently change spectra.
TemplateParams load_template_params(const std::filesystem::path& path);

struct DatasetSpec {
  int clips_per_class = 40;
  std::vector<ClassLabel> classes = {ClassLabel::TH, ClassLabel::WD,
                                     ClassLabel::JH, ClassLabel::SH};
  int n_channels = 32;
  double duration_s = 3.0;
  double sample_rate_hz = 10000.0;
  double noise_level = 0.1;
  std::uint64_t seed = 1;
  TemplateParams templates;

  void validate() const;
};

using Dataset = std::vector<LabeledClip>;

/// Synthesizes one clip. Event templates are class-level "soundtracks"
/// derived from (spec.seed, label) and replayed in every clip of the class;
/// the clip seed only drives amplitude, channel placement and sensor noise.
/// Samples are quantized to float32 so persistence round-trips bit-exactly.
LabeledClip synthesize_clip(ClassLabel label, const DatasetSpec& spec,
                            std::uint64_t clip_seed);

/// clips_per_class event clips per class plus the same number of quiet
/// (EN-labeled) clips, all seeds derived from spec.seed.
Dataset synthesize_dataset(const DatasetSpec& spec);

/// Clip seed used by synthesize_dataset for clip number `index`.
std::uint64_t dataset_clip_seed(const DatasetSpec& spec, int index);

/// Directory layout: `manifest` (text) plus one little-endian float32 raw
/// array per clip per modality, channel-major.
void save_dataset(const Dataset& dataset, const DatasetSpec& spec,
                  const std::filesystem::path& dir);

struct LoadedDataset {
  DatasetSpec spec;
  Dataset clips;
};

LoadedDataset load_dataset(const std::filesystem::path& dir);

}  // namespace csdas
