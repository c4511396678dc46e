#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "csdas/datagen.hpp"
#include "csdas/filterbank.hpp"
#include "csdas/types.hpp"

namespace csdas {

/// Per-band energies of one window: e_i = sum_k |F_i(k)| |X(k)| over all
/// DFT bins (conjugate-symmetric bins counted on both sides, consistently
/// in both domains).
struct FeatureVector {
  Vec band_energies;
  Modality modality = Modality::phase;
  Domain domain = Domain::nyquist;
  int channel = 0;
  int window_index = 0;
};

/// Nyquist-domain frequency band energies of a trace.
FeatureVector fbe(const Trace& trace, const FilterBank& bank, int channel = 0,
                  int window_index = 0);

/// Compressed-domain band energies from the projected bank. The trace and
/// bank must come from the same observation matrix.
FeatureVector cfbe(const CompressedTrace& ctrace,
                   const CompressedFilterBank& cbank, int channel = 0,
                   int window_index = 0);

/// Phase + intensity features of one (channel, window) cell.
struct WindowFeaturePair {
  int channel = 0;
  int window_index = 0;
  FeatureVector phase;
  FeatureVector intensity;
};

struct ClipFeatures {
  std::vector<WindowFeaturePair> nyquist;
  std::vector<WindowFeaturePair> compressed;  // empty when no matrix given
  int windows_per_channel = 0;
};

/// Splits every channel into non-overlapping windows of
/// round(window_s * rate) samples (trailing partial window dropped) and
/// extracts FBE per window; with a matrix, each window is additionally
/// compressed and C-FBE extracted. Batched into matrix products.
ClipFeatures extract_clip_features(
    const LabeledClip& clip, const FilterBank& bank,
    const CompressedFilterBank* cbank = nullptr,
    const ObservationMatrix* matrix = nullptr, double window_s = 0.8);

/// CSV dump, header `channel,window,domain,modality,e0,...,e49`.
void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<FeatureVector>& features);

}  // namespace csdas
