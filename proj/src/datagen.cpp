#include "csdas/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "csdas/csv.hpp"
#include "csdas/fft.hpp"
#include "csdas/rng.hpp"

namespace csdas {

const char* to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::TH: return "TH";
    case ClassLabel::WD: return "WD";
    case ClassLabel::JH: return "JH";
    case ClassLabel::SH: return "SH";
    case ClassLabel::EN: return "EN";
  }
  return "?";
}

ClassLabel class_label_from_string(const std::string& s) {
  if (s == "TH") return ClassLabel::TH;
  if (s == "WD") return ClassLabel::WD;
  if (s == "JH") return ClassLabel::JH;
  if (s == "SH") return ClassLabel::SH;
  if (s == "EN") return ClassLabel::EN;
  throw ParameterError("unknown class label: " + s);
}

void DatasetSpec::validate() const {
  if (clips_per_class < 1) {
    throw ParameterError("DatasetSpec: clips_per_class must be >= 1");
  }
  if (n_channels < 1) {
    throw ParameterError("DatasetSpec: n_channels must be >= 1");
  }
  if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) {
    throw ParameterError("DatasetSpec: duration and rate must be positive");
  }
  if (!(noise_level > 0.0)) {
    throw ParameterError("DatasetSpec: noise_level must be positive");
  }
  for (ClassLabel c : classes) {
    if (c == ClassLabel::EN) {
      throw ParameterError("DatasetSpec: EN is implicit, not an event class");
    }
  }
}

namespace {

struct TemplateField {
  const char* name;
  double TemplateParams::*dbl = nullptr;
  int TemplateParams::*integer = nullptr;
};

constexpr TemplateField kTemplateFields[] = {
    {"floor_amplitude", &TemplateParams::floor_amplitude},
    {"floor_lowpass_hz", &TemplateParams::floor_lowpass_hz},
    {"intensity_scale", &TemplateParams::intensity_scale},
    {"th_lowpass_hz", &TemplateParams::th_lowpass_hz},
    {"th_am_lo_hz", &TemplateParams::th_am_lo_hz},
    {"th_am_hi_hz", &TemplateParams::th_am_hi_hz},
    {"wd_f0_lo_hz", &TemplateParams::wd_f0_lo_hz},
    {"wd_f0_hi_hz", &TemplateParams::wd_f0_hi_hz},
    {"wd_partials", nullptr, &TemplateParams::wd_partials},
    {"wd_amp_exponent", &TemplateParams::wd_amp_exponent},
    {"wd_am_lo_hz", &TemplateParams::wd_am_lo_hz},
    {"wd_am_hi_hz", &TemplateParams::wd_am_hi_hz},
    {"jh_rate_lo_hz", &TemplateParams::jh_rate_lo_hz},
    {"jh_rate_hi_hz", &TemplateParams::jh_rate_hi_hz},
    {"jh_burst_s", &TemplateParams::jh_burst_s},
    {"jh_decay_s", &TemplateParams::jh_decay_s},
    {"jh_lowpass_hz", &TemplateParams::jh_lowpass_hz},
    {"sh_bursts_per_window", nullptr, &TemplateParams::sh_bursts_per_window},
    {"sh_burst_s", &TemplateParams::sh_burst_s},
    {"sh_decay_s", &TemplateParams::sh_decay_s},
    {"sh_lowpass_hz", &TemplateParams::sh_lowpass_hz},
};

void set_template_field(TemplateParams& params, const std::string& key,
                        const std::string& value) {
  for (const auto& field : kTemplateFields) {
    if (key != field.name) continue;
    if (field.dbl != nullptr) {
      params.*(field.dbl) = parse_double(value, key);
    } else {
      params.*(field.integer) = static_cast<int>(parse_long(value, key));
    }
    return;
  }
  throw FormatError("template params: unknown key '" + key + "'");
}

// White noise low-passed with a cosine roll-off above `hi_hz`, unit RMS.
Vec lowpassed_noise(Rng& rng, Eigen::Index n, double hi_hz, double fs) {
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.gaussian();
  CVec spec = fft_unitary(x);
  const double roll = 0.2 * hi_hz;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = std::min<double>(k, n - k) * fs / static_cast<double>(n);
    const double w = std::clamp((hi_hz * 1.2 - f) / roll, 0.0, 1.0);
    spec[k] *= w;
  }
  Vec out = ifft_unitary_real(spec);
  const double rms = std::sqrt(out.squaredNorm() / static_cast<double>(n));
  return rms > 0.0 ? Vec(out / rms) : out;
}

// Class-level event waveform ("soundtrack"), replayed by every clip of the
// class: amplitude and noise vary per clip, the waveform does not. The
// compressed-domain features only carry class structure when the underlying
// waveform is shared, mirroring the replayed-recording experiment this
// generator stands in for.
Vec class_soundtrack(ClassLabel label, const DatasetSpec& spec) {
  const auto n =
      static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.sample_rate_hz));
  const double fs = spec.sample_rate_hz;
  const TemplateParams& tp = spec.templates;
  Rng rng(derive_seed(spec.seed, 0xc1a5 + static_cast<int>(label)));
  Vec sig = Vec::Zero(n);

  switch (label) {
    case ClassLabel::TH: {
      // Low-frequency broadband with slow amplitude modulation.
      sig = lowpassed_noise(rng, n, tp.th_lowpass_hz, fs);
      const double mod_hz = rng.uniform(tp.th_am_lo_hz, tp.th_am_hi_hz);
      const double mod_phase = rng.uniform(0.0, 2.0 * M_PI);
      for (Eigen::Index i = 0; i < n; ++i) {
        sig[i] *= 0.6 + 0.4 * std::sin(2.0 * M_PI * mod_hz * i / fs + mod_phase);
      }
      break;
    }
    case ClassLabel::WD: {
      // Harmonic series on a fundamental drawn once per class.
      const double f0 = rng.uniform(tp.wd_f0_lo_hz, tp.wd_f0_hi_hz);
      for (int h = 1; h * f0 <= fs / 2.0 && h <= tp.wd_partials; ++h) {
        const double amp = 1.0 / std::pow(h, tp.wd_amp_exponent);
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        for (Eigen::Index i = 0; i < n; ++i) {
          sig[i] += amp * std::sin(2.0 * M_PI * h * f0 * i / fs + phase);
        }
      }
      const double am_hz = rng.uniform(tp.wd_am_lo_hz, tp.wd_am_hi_hz);
      for (Eigen::Index i = 0; i < n; ++i) {
        sig[i] *= 1.0 + 0.2 * std::sin(2.0 * M_PI * am_hz * i / fs);
      }
      break;
    }
    case ClassLabel::JH: {
      // Periodic broadband impulse bursts.
      const double rate = rng.uniform(tp.jh_rate_lo_hz, tp.jh_rate_hi_hz);
      const auto burst_len = static_cast<Eigen::Index>(tp.jh_burst_s * fs);
      double t = 0.0;
      while (t < spec.duration_s) {
        const Vec burst = lowpassed_noise(rng, burst_len, tp.jh_lowpass_hz, fs);
        const auto start = static_cast<Eigen::Index>(t * fs);
        for (Eigen::Index i = 0; i < burst_len && start + i < n; ++i) {
          sig[start + i] +=
              std::exp(-static_cast<double>(i) / (tp.jh_decay_s * fs)) *
              burst[i];
        }
        t += 1.0 / rate * rng.uniform(0.95, 1.05);
      }
      break;
    }
    case ClassLabel::SH: {
      // Sparse decaying transients; a fixed number per 0.8 s analysis
      // window so every window of the vibration channel carries the event.
      const auto burst_len = static_cast<Eigen::Index>(tp.sh_burst_s * fs);
      const int n_windows = static_cast<int>(std::ceil(spec.duration_s / 0.8));
      for (int w = 0; w < n_windows; ++w) {
        for (int b = 0; b < tp.sh_bursts_per_window; ++b) {
          const auto start = static_cast<Eigen::Index>(
              (w + rng.uniform(0.0, 0.7)) * 0.8 * fs);
          const Vec burst =
              lowpassed_noise(rng, burst_len, tp.sh_lowpass_hz, fs);
          for (Eigen::Index i = 0; i < burst_len && start + i < n; ++i) {
            sig[start + i] +=
                std::exp(-static_cast<double>(i) / (tp.sh_decay_s * fs)) *
                burst[i];
          }
        }
      }
      break;
    }
    case ClassLabel::EN:
      throw ParameterError("class_soundtrack: EN has no event template");
  }

  const double rms = std::sqrt(sig.squaredNorm() / static_cast<double>(n));
  if (rms > 0.0) sig /= rms;
  // Broadband coupling floor: events raise every analysis band, not only
  // their signature bands, which is what the 80 % detection rule needs.
  sig += tp.floor_amplitude * lowpassed_noise(rng, n, tp.floor_lowpass_hz, fs);
  return sig;
}

double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

TemplateParams load_template_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open template params: " + path.string());
  }
  TemplateParams params;
  std::string line;
  int line_no = 0;
  auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!trim(line).empty()) {
        throw FormatError("template params: bad line " +
                          std::to_string(line_no));
      }
      continue;
    }
    set_template_field(params, trim(line.substr(0, eq)),
                       trim(line.substr(eq + 1)));
  }
  return params;
}

LabeledClip synthesize_clip(ClassLabel label, const DatasetSpec& spec,
                            std::uint64_t clip_seed) {
  spec.validate();
  const auto n =
      static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.sample_rate_hz));
  LabeledClip clip;
  clip.label = label;
  clip.duration_s = spec.duration_s;
  clip.sample_rate_hz = spec.sample_rate_hz;
  clip.clip_seed = clip_seed;
  clip.phase.resize(spec.n_channels);
  clip.intensity.resize(spec.n_channels);

  Rng rng(derive_seed(clip_seed, 0xc11b));
  Vec track;
  double amplitude = 0.0;
  if (label != ClassLabel::EN) {
    clip.vibration_channel = static_cast<int>(rng.uniform_int(spec.n_channels));
    amplitude = rng.uniform(0.7, 1.3);
    track = class_soundtrack(label, spec);
  }

  for (int ch = 0; ch < spec.n_channels; ++ch) {
    Vec phase(n), intensity(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      phase[i] = rng.gaussian(0.0, spec.noise_level);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      intensity[i] = rng.gaussian(0.0, spec.noise_level);
    }
    if (clip.vibration_channel && ch == *clip.vibration_channel) {
      phase += amplitude * track;
      intensity += spec.templates.intensity_scale * amplitude * track;
    }
    phase = phase.unaryExpr(&quantize_f32);
    intensity = intensity.unaryExpr(&quantize_f32);
    clip.phase[ch] = Trace{std::move(phase), spec.sample_rate_hz, Modality::phase};
    clip.intensity[ch] =
        Trace{std::move(intensity), spec.sample_rate_hz, Modality::intensity};
  }
  return clip;
}

std::uint64_t dataset_clip_seed(const DatasetSpec& spec, int index) {
  return derive_seed(spec.seed, 0xda7a + static_cast<std::uint64_t>(index));
}

Dataset synthesize_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset out;
  int index = 0;
  auto add = [&](ClassLabel label, int within_class) {
    LabeledClip clip = synthesize_clip(label, spec, dataset_clip_seed(spec, index));
    std::ostringstream id;
    id << to_string(label) << '_' << within_class;
    clip.clip_id = id.str();
    out.push_back(std::move(clip));
    ++index;
  };
  for (ClassLabel label : spec.classes) {
    for (int c = 0; c < spec.clips_per_class; ++c) add(label, c);
  }
  for (int c = 0; c < spec.clips_per_class; ++c) add(ClassLabel::EN, c);
  return out;
}

namespace {

void write_f32(const std::filesystem::path& path,
               const std::vector<Trace>& traces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  std::vector<float> buf;
  for (const auto& t : traces) {
    buf.resize(t.samples.size());
    for (Eigen::Index i = 0; i < t.samples.size(); ++i) {
      buf[i] = static_cast<float>(t.samples[i]);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              sizeof(float) * buf.size());
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

std::vector<Vec> read_f32(const std::filesystem::path& path,
                          const std::string& clip_id, int channels,
                          Eigen::Index samples) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("dataset: missing array file for clip " + clip_id);
  }
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg());
  const std::uint64_t expected =
      sizeof(float) * static_cast<std::uint64_t>(channels) * samples;
  if (bytes != expected) {
    std::ostringstream os;
    os << "dataset: clip " << clip_id << ": " << path.filename().string()
       << " holds " << bytes << " bytes, manifest implies " << expected;
    throw FormatError(os.str());
  }
  in.seekg(0);
  std::vector<Vec> out(channels);
  std::vector<float> buf(samples);
  for (int ch = 0; ch < channels; ++ch) {
    in.read(reinterpret_cast<char*>(buf.data()), sizeof(float) * samples);
    if (!in) {
      throw FormatError("dataset: clip " + clip_id + ": truncated read");
    }
    out[ch].resize(samples);
    for (Eigen::Index i = 0; i < samples; ++i) {
      out[ch][i] = static_cast<double>(buf[i]);
    }
  }
  return out;
}

}  // namespace

void save_dataset(const Dataset& dataset, const DatasetSpec& spec,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream manifest;
  manifest << "csdas-dataset v1\n";
  manifest << "clips_per_class = " << spec.clips_per_class << "\n";
  manifest << "classes =";
  for (ClassLabel c : spec.classes) manifest << ' ' << to_string(c);
  manifest << "\n";
  manifest << "n_channels = " << spec.n_channels << "\n";
  manifest << "duration_s = " << format_double(spec.duration_s) << "\n";
  manifest << "sample_rate_hz = " << format_double(spec.sample_rate_hz) << "\n";
  manifest << "noise_level = " << format_double(spec.noise_level) << "\n";
  manifest << "seed = " << spec.seed << "\n";
  for (const auto& field : kTemplateFields) {
    manifest << "template." << field.name << " = ";
    if (field.dbl != nullptr) {
      manifest << format_double(spec.templates.*(field.dbl));
    } else {
      manifest << spec.templates.*(field.integer);
    }
    manifest << "\n";
  }
  manifest << "clip_count = " << dataset.size() << "\n";
  for (const auto& clip : dataset) {
    manifest << "clip " << clip.clip_id << ' ' << to_string(clip.label) << ' '
             << clip.clip_seed << ' '
             << (clip.vibration_channel ? *clip.vibration_channel : -1) << ' '
             << clip.channel_count() << ' ' << clip.samples_per_channel()
             << "\n";
    write_f32(dir / (clip.clip_id + ".phase.f32"), clip.phase);
    write_f32(dir / (clip.clip_id + ".intensity.f32"), clip.intensity);
  }
  const auto tmp = dir / "manifest.tmp";
  {
    std::ofstream out(tmp);
    out << manifest.str();
    if (!out) throw FormatError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / "manifest");
}

LoadedDataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest");
  if (!in) {
    throw FormatError("dataset: missing manifest in " + dir.string());
  }
  std::string line;
  std::getline(in, line);
  if (line != "csdas-dataset v1") {
    throw FormatError("dataset: bad manifest magic line");
  }

  LoadedDataset out;
  auto read_kv = [&](const std::string& key) -> std::string {
    std::string k, eq;
    if (!(in >> k >> eq) || k != key || eq != "=") {
      throw FormatError("dataset manifest: expected field '" + key + "'");
    }
    std::string rest;
    std::getline(in, rest);
    return rest.empty() ? rest : rest.substr(1);
  };

  out.spec.clips_per_class =
      static_cast<int>(parse_long(read_kv("clips_per_class"), "clips_per_class"));
  {
    std::istringstream cls(read_kv("classes"));
    out.spec.classes.clear();
    std::string name;
    while (cls >> name) out.spec.classes.push_back(class_label_from_string(name));
  }
  out.spec.n_channels =
      static_cast<int>(parse_long(read_kv("n_channels"), "n_channels"));
  out.spec.duration_s = parse_double(read_kv("duration_s"), "duration_s");
  out.spec.sample_rate_hz =
      parse_double(read_kv("sample_rate_hz"), "sample_rate_hz");
  out.spec.noise_level = parse_double(read_kv("noise_level"), "noise_level");
  out.spec.seed =
      static_cast<std::uint64_t>(parse_long(read_kv("seed"), "seed"));
  long clip_count = -1;
  while (true) {
    std::string key, eq, value;
    if (!(in >> key >> eq >> value) || eq != "=") {
      throw FormatError("dataset manifest: expected field 'clip_count'");
    }
    if (key == "clip_count") {
      clip_count = parse_long(value, "clip_count");
      break;
    }
    if (key.rfind("template.", 0) != 0) {
      throw FormatError("dataset manifest: unexpected field '" + key + "'");
    }
    set_template_field(out.spec.templates, key.substr(9), value);
  }

  for (long c = 0; c < clip_count; ++c) {
    std::string tag, id, label;
    std::uint64_t clip_seed;
    int vib, channels;
    Eigen::Index samples;
    if (!(in >> tag >> id >> label >> clip_seed >> vib >> channels >> samples) ||
        tag != "clip") {
      throw FormatError("dataset manifest: bad clip row " + std::to_string(c));
    }
    LabeledClip clip;
    clip.clip_id = id;
    clip.label = class_label_from_string(label);
    clip.clip_seed = clip_seed;
    if (vib >= 0) clip.vibration_channel = vib;
    clip.duration_s = out.spec.duration_s;
    clip.sample_rate_hz = out.spec.sample_rate_hz;
    auto phase = read_f32(dir / (id + ".phase.f32"), id, channels, samples);
    auto intensity =
        read_f32(dir / (id + ".intensity.f32"), id, channels, samples);
    for (int ch = 0; ch < channels; ++ch) {
      clip.phase.push_back(
          Trace{std::move(phase[ch]), out.spec.sample_rate_hz, Modality::phase});
      clip.intensity.push_back(Trace{std::move(intensity[ch]),
                                     out.spec.sample_rate_hz,
                                     Modality::intensity});
    }
    out.clips.push_back(std::move(clip));
  }
  return out;
}

}  // namespace csdas
