#include "csdas/features.hpp"

#include <cmath>
#include <fstream>

#include "csdas/csv.hpp"
#include "csdas/fft.hpp"

namespace csdas {
namespace {

Vec band_energies_from_abs_spectrum(const Mat& abs_responses,
                                    const Vec& abs_spectrum) {
  // |F_i(k) X(k)| = |F_i(k)| |X(k)|, so the band sum is a matrix product.
  return abs_responses * abs_spectrum;
}

}  // namespace

FeatureVector fbe(const Trace& trace, const FilterBank& bank, int channel,
                  int window_index) {
  trace.validate();
  if (trace.size() != bank.n) {
    throw ParameterError("fbe: trace length != bank length");
  }
  FeatureVector out;
  out.band_energies = band_energies_from_abs_spectrum(
      bank.abs_frequency_responses, fft_unitary(trace.samples).cwiseAbs());
  out.modality = trace.modality;
  out.domain = Domain::nyquist;
  out.channel = channel;
  out.window_index = window_index;
  return out;
}

FeatureVector cfbe(const CompressedTrace& ctrace,
                   const CompressedFilterBank& cbank, int channel,
                   int window_index) {
  if (ctrace.size() != cbank.m) {
    throw ParameterError("cfbe: trace length != projected bank length");
  }
  if (ctrace.matrix_id != cbank.matrix_id) {
    throw ParameterError("cfbe: observation matrix mismatch (" +
                         ctrace.matrix_id + " vs " + cbank.matrix_id + ")");
  }
  FeatureVector out;
  out.band_energies = band_energies_from_abs_spectrum(
      cbank.abs_compressed_frequency_responses,
      fft_unitary(ctrace.samples).cwiseAbs());
  out.modality = ctrace.modality;
  out.domain = Domain::compressed;
  out.channel = channel;
  out.window_index = window_index;
  return out;
}

ClipFeatures extract_clip_features(const LabeledClip& clip,
                                   const FilterBank& bank,
                                   const CompressedFilterBank* cbank,
                                   const ObservationMatrix* matrix,
                                   double window_s) {
  if (clip.channel_count() == 0) {
    throw ParameterError("extract_clip_features: clip has no channels");
  }
  if (clip.sample_rate_hz != bank.sample_rate_hz) {
    throw ParameterError("extract_clip_features: sample rate mismatch");
  }
  const auto window_len = static_cast<Eigen::Index>(
      std::llround(window_s * clip.sample_rate_hz));
  if (window_len < 2 || window_len > clip.samples_per_channel()) {
    throw ParameterError("extract_clip_features: window longer than clip");
  }
  if (window_len != bank.n) {
    throw ParameterError("extract_clip_features: window length != bank length");
  }
  if ((cbank == nullptr) != (matrix == nullptr)) {
    throw ParameterError(
        "extract_clip_features: compressed bank and matrix must be given "
        "together");
  }
  if (matrix != nullptr) {
    if (matrix->n() != window_len) {
      throw ParameterError("extract_clip_features: matrix cols != window");
    }
    if (matrix->id() != cbank->matrix_id) {
      throw ParameterError("extract_clip_features: bank projected with a "
                           "different matrix");
    }
  }

  const int n_ch = clip.channel_count();
  const int n_win =
      static_cast<int>(clip.samples_per_channel() / window_len);
  const int cols_per_modality = n_ch * n_win;

  // Window matrix: one column per (channel, window, modality); phase block
  // first, then intensity.
  Mat windows(window_len, 2 * cols_per_modality);
  for (int ch = 0; ch < n_ch; ++ch) {
    for (int w = 0; w < n_win; ++w) {
      windows.col(ch * n_win + w) =
          clip.phase[ch].samples.segment(w * window_len, window_len);
      windows.col(cols_per_modality + ch * n_win + w) =
          clip.intensity[ch].samples.segment(w * window_len, window_len);
    }
  }

  ClipFeatures out;
  out.windows_per_channel = n_win;

  Mat abs_spectra(window_len, windows.cols());
  for (Eigen::Index c = 0; c < windows.cols(); ++c) {
    abs_spectra.col(c) = fft_unitary(Vec(windows.col(c))).cwiseAbs();
  }
  const Mat energies = bank.abs_frequency_responses * abs_spectra;

  Mat c_energies;
  if (matrix != nullptr) {
    const Mat compressed = compress_columns(*matrix, windows);
    Mat abs_cspectra(compressed.rows(), compressed.cols());
    for (Eigen::Index c = 0; c < compressed.cols(); ++c) {
      abs_cspectra.col(c) = fft_unitary(Vec(compressed.col(c))).cwiseAbs();
    }
    c_energies = cbank->abs_compressed_frequency_responses * abs_cspectra;
  }

  auto make_pair = [&](const Mat& e, Domain domain, int ch,
                       int w) -> WindowFeaturePair {
    WindowFeaturePair pair;
    pair.channel = ch;
    pair.window_index = w;
    const int col = ch * n_win + w;
    pair.phase = FeatureVector{Vec(e.col(col)), Modality::phase, domain, ch, w};
    pair.intensity = FeatureVector{Vec(e.col(cols_per_modality + col)),
                                   Modality::intensity, domain, ch, w};
    return pair;
  };

  for (int ch = 0; ch < n_ch; ++ch) {
    for (int w = 0; w < n_win; ++w) {
      out.nyquist.push_back(make_pair(energies, Domain::nyquist, ch, w));
      if (matrix != nullptr) {
        out.compressed.push_back(
            make_pair(c_energies, Domain::compressed, ch, w));
      }
    }
  }
  return out;
}

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<FeatureVector>& features) {
  CsvWriter csv(path);
  std::vector<std::string> header = {"channel", "window", "domain",
                                     "modality"};
  const Eigen::Index nb =
      features.empty() ? 0 : features.front().band_energies.size();
  for (Eigen::Index i = 0; i < nb; ++i) {
    header.push_back("e" + std::to_string(i));
  }
  csv.write_row(header);
  for (const auto& f : features) {
    csv.begin_row();
    csv.field(f.channel).field(f.window_index).field(to_string(f.domain));
    csv.field(to_string(f.modality));
    for (Eigen::Index i = 0; i < f.band_energies.size(); ++i) {
      csv.field(f.band_energies[i]);
    }
    csv.end_row();
  }
}

}  // namespace csdas
