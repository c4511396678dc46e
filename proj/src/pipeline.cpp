#include "csdas/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "csdas/csv.hpp"
#include "csdas/rng.hpp"
#include "csdas/version.hpp"

namespace csdas {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool window_truth(const LabeledClip& clip, int channel) {
  return clip.label != ClassLabel::EN && clip.vibration_channel &&
         *clip.vibration_channel == channel;
}

const std::vector<WindowFeaturePair>& domain_pairs(const ClipFeatures& cf,
                                                   Domain domain) {
  return domain == Domain::nyquist ? cf.nyquist : cf.compressed;
}

std::string domain_suffix(Domain d) {
  return d == Domain::nyquist ? "nyquist" : "compressed";
}

}  // namespace

std::vector<double> DetectionConfig::multiplier_grid() const {
  if (!(grid_step > 0.0) || !(grid_hi >= grid_lo) || !(grid_lo > 0.0)) {
    throw ParameterError("detection: bad multiplier grid");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double m = grid_lo + grid_step * i;
    if (m > grid_hi + 1e-12) break;
    grid.push_back(m);
  }
  return grid;
}

PipelineContext prepare_context(const RunConfig& config) {
  PipelineContext ctx;
  if (!config.dataset_dir.empty()) {
    LoadedDataset loaded = load_dataset(config.dataset_dir);
    ctx.spec = loaded.spec;
    ctx.clips = std::move(loaded.clips);
  } else {
    ctx.spec = config.dataset;
    ctx.clips = synthesize_dataset(ctx.spec);
  }

  const auto window_len = static_cast<Eigen::Index>(
      std::llround(config.bank.window_s * ctx.spec.sample_rate_hz));
  ctx.bank = build_filter_bank(ctx.spec.sample_rate_hz, window_len,
                               config.bank.n_bands, config.bank.band_width_hz,
                               config.bank.taps);
  ctx.matrix = make_observation_matrix(window_len, config.mr,
                                       config.matrix_seed, config.matrix_kind);
  ctx.cbank = project_filter_bank(ctx.bank, ctx.matrix);

  ctx.features.reserve(ctx.clips.size());
  for (const auto& clip : ctx.clips) {
    ctx.features.push_back(extract_clip_features(
        clip, ctx.bank, &ctx.cbank, &ctx.matrix, config.bank.window_s));
  }
  return ctx;
}

namespace {

struct Stage2Source {
  std::size_t clip_index = 0;
  int channel = 0;
  int window = 0;
  ClassLabel label = ClassLabel::EN;
};

StackedFeature make_stacked(const WindowFeaturePair& pair, ClassLabel label,
                            const std::string& clip_id, bool augmented) {
  StackedFeature sf = normalize_concat(pair.phase, pair.intensity);
  sf.label = label;
  sf.source_clip_id = clip_id;
  sf.augmented = augmented;
  return sf;
}

}  // namespace

DomainRun run_domain(const PipelineContext& ctx, Domain domain,
                     const RunConfig& config) {
  DomainRun run;
  run.report.domain = domain;

  // Stage-I baseline: phase windows of the quiet clips only.
  std::vector<FeatureVector> quiet;
  for (std::size_t c = 0; c < ctx.clips.size(); ++c) {
    if (ctx.clips[c].label != ClassLabel::EN) continue;
    for (const auto& pair : domain_pairs(ctx.features[c], domain)) {
      quiet.push_back(pair.phase);
    }
  }
  run.baseline = baseline_stats(quiet);

  // ROC over every (clip, channel, window) phase feature.
  std::vector<LabeledFeature> labeled;
  for (std::size_t c = 0; c < ctx.clips.size(); ++c) {
    for (const auto& pair : domain_pairs(ctx.features[c], domain)) {
      labeled.push_back(
          {pair.phase, window_truth(ctx.clips[c], pair.channel)});
    }
  }
  run.report.roc =
      roc_sweep(labeled, run.baseline, config.detection.multiplier_grid(),
                config.detection.fraction, config.detection.mode);
  run.report.operating_point = pick_operating_point(run.report.roc);
  const double op_mult = run.report.operating_point.multiplier;

  // Stage-II dataset: true positives keep their class, false alarms are EN.
  std::vector<Stage2Source> sources;
  std::set<std::tuple<std::size_t, int, int>> en_cells;
  std::set<std::size_t> alarmed;  // (clip_index * channels + channel)
  for (std::size_t c = 0; c < ctx.clips.size(); ++c) {
    const auto& clip = ctx.clips[c];
    for (const auto& pair : domain_pairs(ctx.features[c], domain)) {
      const auto decision = detect(pair.phase, run.baseline, op_mult,
                                   config.detection.fraction,
                                   config.detection.mode);
      if (!decision.is_vibration) continue;
      alarmed.insert(c * ctx.spec.n_channels + pair.channel);
      const bool truth = window_truth(clip, pair.channel);
      Stage2Source src{c, pair.channel, pair.window_index,
                       truth ? clip.label : ClassLabel::EN};
      if (!truth) {
        run.report.en_false_alarms++;
        en_cells.emplace(c, pair.channel, pair.window_index);
      }
      sources.push_back(src);
    }
  }
  run.report.alarmed_channels = static_cast<long>(alarmed.size());

  // Quiet-window fill when Stage-I produced too few EN samples; one window
  // per distinct quiet clip per pass keeps clip-level folds stratified.
  if (run.report.en_false_alarms < 20) {
    const int fill_win = ctx.features.empty()
                             ? 0
                             : ctx.features.front().windows_per_channel;
    long en_total = run.report.en_false_alarms;
    const int cells = fill_win * ctx.spec.n_channels;
    for (int pass = 0; pass < cells && en_total < config.stage2.en_fill;
         ++pass) {
      const int win = pass % fill_win;
      const int ch = (pass / fill_win) % ctx.spec.n_channels;
      for (std::size_t c = 0;
           c < ctx.clips.size() && en_total < config.stage2.en_fill; ++c) {
        if (ctx.clips[c].label != ClassLabel::EN) continue;
        if (en_cells.count({c, ch, win})) continue;
        en_cells.emplace(c, ch, win);
        sources.push_back(Stage2Source{c, ch, win, ClassLabel::EN});
        run.report.en_fill++;
        ++en_total;
      }
    }
  }

  // Base samples.
  const int n_win =
      ctx.features.empty() ? 0 : ctx.features.front().windows_per_channel;
  for (const auto& src : sources) {
    const auto& pairs = domain_pairs(ctx.features[src.clip_index], domain);
    const auto& pair = pairs[src.channel * n_win + src.window];
    run.stage2.push_back(make_stacked(pair, src.label,
                                      ctx.clips[src.clip_index].clip_id,
                                      false));
  }
  run.report.stage2_samples = static_cast<long>(run.stage2.size());

  // Augmented copies, grouped per (clip, channel): the copies become the
  // channels of a throwaway clip so feature extraction batches them.
  std::map<std::pair<std::size_t, int>, std::vector<Stage2Source>> by_cell;
  for (const auto& src : sources) {
    by_cell[{src.clip_index, src.channel}].push_back(src);
  }
  for (const auto& [key, cell_sources] : by_cell) {
    const auto& clip = ctx.clips[key.first];
    const int ch = key.second;
    const std::uint64_t aug_seed =
        derive_seed(config.run_seed, 0xa00 + key.first);

    LabeledClip copies;
    copies.clip_id = clip.clip_id;
    copies.label = clip.label;
    copies.duration_s = clip.duration_s;
    copies.sample_rate_hz = clip.sample_rate_hz;
    for (int copy = 0; copy < config.stage2.n_aug; ++copy) {
      const AugmentChoice choice = draw_augment_choice(aug_seed, copy);
      copies.phase.push_back(
          Trace{apply_augment(clip.phase[ch].samples, clip.sample_rate_hz,
                              choice),
                clip.sample_rate_hz, Modality::phase});
      copies.intensity.push_back(
          Trace{apply_augment(clip.intensity[ch].samples,
                              clip.sample_rate_hz, choice),
                clip.sample_rate_hz, Modality::intensity});
    }
    const bool compressed = domain == Domain::compressed;
    const ClipFeatures aug_features = extract_clip_features(
        copies, ctx.bank, compressed ? &ctx.cbank : nullptr,
        compressed ? &ctx.matrix : nullptr, config.bank.window_s);
    const auto& aug_pairs = domain_pairs(aug_features, domain);
    for (int copy = 0; copy < config.stage2.n_aug; ++copy) {
      for (const auto& src : cell_sources) {
        const auto& pair = aug_pairs[copy * n_win + src.window];
        run.stage2.push_back(
            make_stacked(pair, src.label, clip.clip_id, true));
      }
    }
  }

  // Stage-II cross-validated SVM.
  CvOptions cv;
  cv.folds = config.stage2.folds;
  cv.seed = derive_seed(config.run_seed, 0xc0de + static_cast<int>(domain));
  cv.svm = config.stage2.svm;
  const CvResult res = cross_validate(run.stage2, cv);
  run.report.confusion = res.confusion;
  run.report.overall_accuracy = res.accuracy;
  run.report.event_accuracy = four_class_accuracy(res.confusion);
  run.report.svm_converged = res.converged;

  if (config.stage2.phase_only_ablation) {
    CvOptions ablation = cv;
    ablation.feature_cols = static_cast<int>(ctx.bank.band_count());
    run.report.phase_only_accuracy =
        cross_validate(run.stage2, ablation).accuracy;
  }
  return run;
}

namespace {

void write_features_csv(const std::filesystem::path& path,
                        const PipelineContext& ctx, Domain domain) {
  CsvWriter csv(path);
  std::vector<std::string> header = {"clip",   "label",  "truth",
                                     "channel", "window", "domain",
                                     "modality"};
  for (Eigen::Index i = 0; i < ctx.bank.band_count(); ++i) {
    header.push_back("e" + std::to_string(i));
  }
  csv.write_row(header);
  auto emit = [&](const LabeledClip& clip, const FeatureVector& f,
                  bool truth) {
    csv.begin_row();
    csv.field(clip.clip_id).field(to_string(clip.label));
    csv.field(truth ? 1 : 0);
    csv.field(f.channel).field(f.window_index);
    csv.field(to_string(f.domain)).field(to_string(f.modality));
    for (Eigen::Index i = 0; i < f.band_energies.size(); ++i) {
      csv.field(f.band_energies[i]);
    }
    csv.end_row();
  };
  for (std::size_t c = 0; c < ctx.clips.size(); ++c) {
    for (const auto& pair : domain_pairs(ctx.features[c], domain)) {
      const bool truth = window_truth(ctx.clips[c], pair.channel);
      emit(ctx.clips[c], pair.phase, truth);
      emit(ctx.clips[c], pair.intensity, truth);
    }
  }
}

void write_report(const std::filesystem::path& path, const RunReport& report) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FormatError("cannot open for writing: " + tmp);
    out << "csdas pipeline report\n";
    out << "reduction_ratio = " << format_double(report.reduction_ratio)
        << "\n";
    for (const DomainReport* d : {&report.nyquist, &report.compressed}) {
      out << "\n[" << domain_suffix(d->domain) << "]\n";
      out << "auc = " << format_double(d->roc.auc) << "\n";
      out << "operating_multiplier = "
          << format_double(d->operating_point.multiplier) << "\n";
      out << "operating_tpr = " << format_double(d->operating_point.tpr)
          << "\n";
      out << "operating_fpr = " << format_double(d->operating_point.fpr)
          << "\n";
      out << "alarmed_channels = " << d->alarmed_channels << "\n";
      out << "stage2_samples = " << d->stage2_samples << "\n";
      out << "en_false_alarms = " << d->en_false_alarms << "\n";
      out << "en_fill = " << d->en_fill << "\n";
      out << "overall_accuracy = " << format_double(d->overall_accuracy)
          << "\n";
      out << "four_class_accuracy = " << format_double(d->event_accuracy)
          << "\n";
      out << "phase_only_accuracy = "
          << format_double(d->phase_only_accuracy) << "\n";
      out << "svm_converged = " << (d->svm_converged ? 1 : 0) << "\n";
    }
    if (!out) throw FormatError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_manifest(const RunConfig& config,
                    const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FormatError("cannot open for writing: " + tmp);
    // Comma lists and paths are quoted so the CLI config reader takes them
    // as single values.
    out << "# csdas " << kVersion << " run manifest\n";
    out << "dataset-dir = \"" << config.dataset_dir << "\"\n";
    out << "template-file = \"" << config.template_file << "\"\n";
    out << "clips-per-class = " << config.dataset.clips_per_class << "\n";
    out << "classes = \"";
    for (std::size_t i = 0; i < config.dataset.classes.size(); ++i) {
      out << (i ? "," : "") << to_string(config.dataset.classes[i]);
    }
    out << "\"\n";
    out << "channels = " << config.dataset.n_channels << "\n";
    out << "duration = " << format_double(config.dataset.duration_s) << "\n";
    out << "sample-rate = " << format_double(config.dataset.sample_rate_hz)
        << "\n";
    out << "noise-level = " << format_double(config.dataset.noise_level)
        << "\n";
    out << "dataset-seed = " << config.dataset.seed << "\n";
    out << "mr = " << format_double(config.mr) << "\n";
    out << "matrix-seed = " << config.matrix_seed << "\n";
    out << "matrix-kind = " << to_string(config.matrix_kind) << "\n";
    out << "bands = " << config.bank.n_bands << "\n";
    out << "band-width = " << format_double(config.bank.band_width_hz) << "\n";
    out << "taps = " << config.bank.taps << "\n";
    out << "window = " << format_double(config.bank.window_s) << "\n";
    out << "fraction = " << format_double(config.detection.fraction) << "\n";
    out << "grid-lo = " << format_double(config.detection.grid_lo) << "\n";
    out << "grid-hi = " << format_double(config.detection.grid_hi) << "\n";
    out << "grid-step = " << format_double(config.detection.grid_step) << "\n";
    out << "threshold-mode = "
        << (config.detection.mode == ThresholdMode::per_band ? "per_band"
                                                             : "scalar")
        << "\n";
    out << "svm-kernel = "
        << (config.stage2.svm.kernel == SvmKernel::rbf ? "rbf" : "linear")
        << "\n";
    out << "svm-c = " << format_double(config.stage2.svm.c) << "\n";
    out << "svm-gamma = " << format_double(config.stage2.svm.gamma) << "\n";
    out << "svm-tol = " << format_double(config.stage2.svm.tol) << "\n";
    out << "svm-max-iter = " << config.stage2.svm.max_iter << "\n";
    out << "folds = " << config.stage2.folds << "\n";
    out << "aug-copies = " << config.stage2.n_aug << "\n";
    out << "en-fill = " << config.stage2.en_fill << "\n";
    out << "phase-only-ablation = "
        << (config.stage2.phase_only_ablation ? "true" : "false") << "\n";
    out << "sweep-mr = \"";
    for (std::size_t i = 0; i < config.sweep.mr_grid.size(); ++i) {
      out << (i ? "," : "") << format_double(config.sweep.mr_grid[i]);
    }
    out << "\"\n";
    out << "sweep-k = \"";
    for (std::size_t i = 0; i < config.sweep.k_grid.size(); ++i) {
      out << (i ? "," : "") << config.sweep.k_grid[i];
    }
    out << "\"\n";
    out << "bench-windows = " << config.bench.windows << "\n";
    out << "bench-k = " << config.bench.k << "\n";
    out << "run-seed = " << config.run_seed << "\n";
    if (!out) throw FormatError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

RunReport run_pipeline(const RunConfig& config) {
  const std::filesystem::path out_dir = config.out_dir;
  std::filesystem::create_directories(out_dir);

  RunReport report;
  report.reduction_ratio = 1.0 - config.mr;

  auto t0 = Clock::now();
  PipelineContext ctx = prepare_context(config);
  report.timings.emplace_back("prepare_and_features", seconds_since(t0));

  t0 = Clock::now();
  DomainRun ny = run_domain(ctx, Domain::nyquist, config);
  report.timings.emplace_back("nyquist_domain", seconds_since(t0));

  t0 = Clock::now();
  DomainRun comp = run_domain(ctx, Domain::compressed, config);
  report.timings.emplace_back("compressed_domain", seconds_since(t0));

  report.nyquist = ny.report;
  report.compressed = comp.report;

  t0 = Clock::now();
  write_features_csv(out_dir / "features_nyquist.csv", ctx, Domain::nyquist);
  write_features_csv(out_dir / "features_compressed.csv", ctx,
                     Domain::compressed);
  write_roc_csv(out_dir / "roc_nyquist.csv", ny.report.roc);
  write_roc_csv(out_dir / "roc_compressed.csv", comp.report.roc);
  write_confusion_csv(out_dir / "confusion_nyquist.csv", ny.report.confusion);
  write_confusion_csv(out_dir / "confusion_compressed.csv",
                      comp.report.confusion);
  write_report(out_dir / "report", report);
  write_manifest(config, out_dir / "manifest");
  report.timings.emplace_back("write_outputs", seconds_since(t0));

  {
    CsvWriter csv(out_dir / "timings.csv");
    csv.write_row({"stage", "seconds"});
    for (const auto& [stage, secs] : report.timings) {
      csv.begin_row();
      csv.field(stage).field(secs);
      csv.end_row();
    }
  }
  return report;
}

void run_generate(const RunConfig& config,
                  const std::filesystem::path& target_dir) {
  const Dataset dataset = synthesize_dataset(config.dataset);
  save_dataset(dataset, config.dataset, target_dir);
}

std::vector<SweepCell> run_sweep(const RunConfig& config) {
  Dataset clips;
  DatasetSpec spec;
  if (!config.dataset_dir.empty()) {
    LoadedDataset loaded = load_dataset(config.dataset_dir);
    spec = loaded.spec;
    clips = std::move(loaded.clips);
  } else {
    spec = config.dataset;
    clips = synthesize_dataset(spec);
  }

  const LabeledClip* event = nullptr;
  for (const auto& clip : clips) {
    if (clip.label != ClassLabel::EN) {
      event = &clip;
      break;
    }
  }
  if (event == nullptr) {
    throw ParameterError("sweep: dataset has no event clip");
  }
  const auto window_len = static_cast<Eigen::Index>(
      std::llround(config.bank.window_s * spec.sample_rate_hz));
  Trace window;
  window.samples =
      event->phase[*event->vibration_channel].samples.head(window_len);
  window.sample_rate_hz = spec.sample_rate_hz;
  window.modality = Modality::phase;

  const auto cells =
      sweep_reconstruction(window, config.sweep.mr_grid, config.sweep.k_grid,
                           derive_seed(config.run_seed, 0x53ee));
  std::filesystem::create_directories(config.out_dir);
  write_sweep_csv(std::filesystem::path(config.out_dir) / "sweep.csv", cells);
  return cells;
}

BenchResult run_bench(const RunConfig& config) {
  Dataset clips;
  DatasetSpec spec;
  if (!config.dataset_dir.empty()) {
    LoadedDataset loaded = load_dataset(config.dataset_dir);
    spec = loaded.spec;
    clips = std::move(loaded.clips);
  } else {
    spec = config.dataset;
    clips = synthesize_dataset(spec);
  }

  const auto window_len = static_cast<Eigen::Index>(
      std::llround(config.bank.window_s * spec.sample_rate_hz));
  FilterBank bank =
      build_filter_bank(spec.sample_rate_hz, window_len, config.bank.n_bands,
                        config.bank.band_width_hz, config.bank.taps);
  ObservationMatrix matrix = make_observation_matrix(
      window_len, config.mr, config.matrix_seed, config.matrix_kind);
  CompressedFilterBank cbank = project_filter_bank(bank, matrix);

  std::vector<CompressedTrace> windows;
  for (const auto& clip : clips) {
    if (clip.label == ClassLabel::EN || !clip.vibration_channel) continue;
    const auto& samples = clip.phase[*clip.vibration_channel].samples;
    const auto n_win = samples.size() / window_len;
    for (Eigen::Index w = 0;
         w < n_win && windows.size() <
             static_cast<std::size_t>(config.bench.windows);
         ++w) {
      Trace t{Vec(samples.segment(w * window_len, window_len)),
              spec.sample_rate_hz, Modality::phase};
      windows.push_back(compress(matrix, t));
    }
    if (windows.size() >= static_cast<std::size_t>(config.bench.windows)) {
      break;
    }
  }
  if (windows.empty()) {
    throw ParameterError("bench: no event windows available");
  }

  BenchResult result;
  result.windows = static_cast<int>(windows.size());
  result.k = config.bench.k;
  for (const auto& y : windows) {
    auto t0 = Clock::now();
    ReconstructionResult rec = omp_reconstruct(y, matrix, config.bench.k);
    rec.reconstructed.sample_rate_hz = spec.sample_rate_hz;
    fbe(rec.reconstructed, bank);
    result.mean_reconstruct_fbe_s += seconds_since(t0);

    t0 = Clock::now();
    cfbe(y, cbank);
    result.mean_cfbe_s += seconds_since(t0);
  }
  result.mean_reconstruct_fbe_s /= result.windows;
  result.mean_cfbe_s /= result.windows;
  result.speedup = result.mean_reconstruct_fbe_s /
                   std::max(result.mean_cfbe_s, 1e-12);

  std::filesystem::create_directories(config.out_dir);
  CsvWriter csv(std::filesystem::path(config.out_dir) / "bench.csv");
  csv.write_row({"path", "windows", "k", "mean_wall_time_s",
                 "speedup_vs_reconstruct"});
  csv.begin_row();
  csv.field("reconstruct_then_fbe").field(result.windows).field(result.k);
  csv.field(result.mean_reconstruct_fbe_s).field(1.0);
  csv.end_row();
  csv.begin_row();
  csv.field("direct_cfbe").field(result.windows).field(result.k);
  csv.field(result.mean_cfbe_s).field(result.speedup);
  csv.end_row();
  return result;
}

}  // namespace csdas
