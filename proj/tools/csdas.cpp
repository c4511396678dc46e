#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "csdas/csv.hpp"
#include "csdas/pipeline.hpp"
#include "csdas/version.hpp"

namespace {

using namespace csdas;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Options shared by the pipeline-flavored subcommands, parsed into strings
// first so grids and enums can live in one flat key = value config file
// (the run manifest is exactly that file).
struct CliConfig {
  RunConfig run;
  std::string classes = "TH,WD,JH,SH";
  std::string matrix_kind = "row_orthonormal_gaussian";
  std::string threshold_mode = "per_band";
  std::string svm_kernel = "rbf";
  std::string sweep_mr = "0.02,0.04,0.08,0.16";
  std::string sweep_k = "6,10,16,24";
  double multiplier_override = 0.0;

  RunConfig resolve() {
    RunConfig cfg = run;
    cfg.dataset.classes.clear();
    for (const auto& name : split(classes, ',')) {
      cfg.dataset.classes.push_back(class_label_from_string(name));
    }
    if (!cfg.template_file.empty()) {
      cfg.dataset.templates = load_template_params(cfg.template_file);
    }
    cfg.matrix_kind = matrix_kind_from_string(matrix_kind);
    if (threshold_mode == "per_band") {
      cfg.detection.mode = ThresholdMode::per_band;
    } else if (threshold_mode == "scalar") {
      cfg.detection.mode = ThresholdMode::scalar;
    } else {
      throw ParameterError("threshold-mode must be per_band or scalar");
    }
    if (svm_kernel == "rbf") {
      cfg.stage2.svm.kernel = SvmKernel::rbf;
    } else if (svm_kernel == "linear") {
      cfg.stage2.svm.kernel = SvmKernel::linear;
    } else {
      throw ParameterError("svm-kernel must be rbf or linear");
    }
    cfg.sweep.mr_grid.clear();
    for (const auto& v : split(sweep_mr, ',')) {
      cfg.sweep.mr_grid.push_back(parse_double(v, "sweep-mr"));
    }
    cfg.sweep.k_grid.clear();
    for (const auto& v : split(sweep_k, ',')) {
      cfg.sweep.k_grid.push_back(static_cast<int>(parse_long(v, "sweep-k")));
    }
    return cfg;
  }
};

// Registered once on the top-level app; subcommands fall through to these,
// so `csdas pipeline --mr 0.3` and `csdas --mr 0.3 pipeline` both work and
// one flat config file (the run manifest) covers every subcommand.
void add_common_options(CLI::App* cmd, CliConfig& c) {
  cmd->set_config("--config", "", "Read options from a key = value file "
                                  "(e.g. a previous run's manifest)");
  cmd->add_option("--dataset-dir", c.run.dataset_dir,
                  "Load this dataset directory instead of synthesizing");
  cmd->add_option("--template-file", c.run.template_file,
                  "key = value overrides for the class spectral templates");
  cmd->add_option("--clips-per-class", c.run.dataset.clips_per_class,
                  "Clips per event class (and quiet clips)")
      ->capture_default_str();
  cmd->add_option("--classes", c.classes, "Event classes, comma separated")
      ->capture_default_str();
  cmd->add_option("--channels", c.run.dataset.n_channels,
                  "Fiber channels per clip")
      ->capture_default_str();
  cmd->add_option("--duration", c.run.dataset.duration_s,
                  "Clip duration in seconds")
      ->capture_default_str();
  cmd->add_option("--sample-rate", c.run.dataset.sample_rate_hz,
                  "Pulse repetition rate in Hz")
      ->capture_default_str();
  cmd->add_option("--noise-level", c.run.dataset.noise_level,
                  "Sensor noise RMS relative to unit event amplitude")
      ->capture_default_str();
  cmd->add_option("--dataset-seed", c.run.dataset.seed, "Dataset seed")
      ->capture_default_str();
  cmd->add_option("--mr", c.run.mr, "Measurement ratio M/N")
      ->capture_default_str();
  cmd->add_option("--matrix-seed", c.run.matrix_seed,
                  "Observation matrix seed")
      ->capture_default_str();
  cmd->add_option("--matrix-kind", c.matrix_kind,
                  "gaussian | row_orthonormal_gaussian | identity")
      ->capture_default_str();
  cmd->add_option("--bands", c.run.bank.n_bands, "Filter bank band count")
      ->capture_default_str();
  cmd->add_option("--band-width", c.run.bank.band_width_hz,
                  "Band width in Hz")
      ->capture_default_str();
  cmd->add_option("--taps", c.run.bank.taps, "FIR taps per band filter")
      ->capture_default_str();
  cmd->add_option("--window", c.run.bank.window_s,
                  "Analysis window in seconds")
      ->capture_default_str();
  cmd->add_option("--fraction", c.run.detection.fraction,
                  "Fraction of bands that must exceed the threshold")
      ->capture_default_str();
  cmd->add_option("--grid-lo", c.run.detection.grid_lo,
                  "Smallest threshold multiplier")
      ->capture_default_str();
  cmd->add_option("--grid-hi", c.run.detection.grid_hi,
                  "Largest threshold multiplier")
      ->capture_default_str();
  cmd->add_option("--grid-step", c.run.detection.grid_step,
                  "Multiplier grid step")
      ->capture_default_str();
  cmd->add_option("--threshold-mode", c.threshold_mode,
                  "per_band | scalar baseline reference")
      ->capture_default_str();
  cmd->add_option("--svm-kernel", c.svm_kernel, "rbf | linear")
      ->capture_default_str();
  cmd->add_option("--svm-c", c.run.stage2.svm.c, "SVM box constraint")
      ->capture_default_str();
  cmd->add_option("--svm-gamma", c.run.stage2.svm.gamma,
                  "RBF gamma; 0 = 1/(dims * mean feature variance)")
      ->capture_default_str();
  cmd->add_option("--svm-tol", c.run.stage2.svm.tol, "SMO KKT tolerance")
      ->capture_default_str();
  cmd->add_option("--svm-max-iter", c.run.stage2.svm.max_iter,
                  "SMO iteration cap per binary problem")
      ->capture_default_str();
  cmd->add_option("--folds", c.run.stage2.folds, "Cross-validation folds")
      ->capture_default_str();
  cmd->add_option("--aug-copies", c.run.stage2.n_aug,
                  "Augmented copies per training clip")
      ->capture_default_str();
  cmd->add_option("--en-fill", c.run.stage2.en_fill,
                  "EN sample target when false alarms are scarce")
      ->capture_default_str();
  cmd->add_option("--phase-only-ablation", c.run.stage2.phase_only_ablation,
                  "Also cross-validate on the 50-dim phase block")
      ->capture_default_str();
  cmd->add_option("--sweep-mr", c.sweep_mr,
                  "Sweep measurement ratios, comma separated")
      ->capture_default_str();
  cmd->add_option("--sweep-k", c.sweep_k, "Sweep sparsity levels")
      ->capture_default_str();
  cmd->add_option("--bench-windows", c.run.bench.windows,
                  "Windows timed by bench")
      ->capture_default_str();
  cmd->add_option("--bench-k", c.run.bench.k, "OMP iterations timed by bench")
      ->capture_default_str();
  cmd->add_option("--run-seed", c.run.run_seed, "Master run seed")
      ->capture_default_str();
  cmd->add_option("--out", c.run.out_dir, "Output directory")
      ->capture_default_str();
}

std::vector<FeatureVector> features_from_rows(
    const CsvTable& table, const std::vector<std::size_t>& rows,
    std::size_t first_band, std::size_t n_bands) {
  std::vector<FeatureVector> out;
  const auto ch_col = table.column("channel");
  const auto win_col = table.column("window");
  const auto dom_col = table.column("domain");
  const auto mod_col = table.column("modality");
  for (std::size_t r : rows) {
    const auto& row = table.rows[r];
    FeatureVector f;
    f.channel = static_cast<int>(parse_long(row[ch_col], "channel"));
    f.window_index = static_cast<int>(parse_long(row[win_col], "window"));
    f.domain = row[dom_col] == "compressed" ? Domain::compressed
                                            : Domain::nyquist;
    f.modality = row[mod_col] == "intensity" ? Modality::intensity
                                             : Modality::phase;
    f.band_energies.resize(n_bands);
    for (std::size_t b = 0; b < n_bands; ++b) {
      f.band_energies[b] = parse_double(row[first_band + b], "band energy");
    }
    out.push_back(std::move(f));
  }
  return out;
}

int cmd_detect(const std::string& features_path, const CliConfig& cli) {
  const CsvTable table = read_csv(features_path);
  const auto label_col = table.column("label");
  const auto truth_col = table.column("truth");
  const auto mod_col = table.column("modality");
  const auto first_band = table.column("e0");
  const std::size_t n_bands = table.header.size() - first_band;

  std::vector<std::size_t> quiet_rows, all_rows;
  std::vector<bool> truths;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r][mod_col] != "phase") continue;
    all_rows.push_back(r);
    truths.push_back(table.rows[r][truth_col] == "1");
    if (table.rows[r][label_col] == "EN") quiet_rows.push_back(r);
  }
  if (all_rows.empty()) {
    throw FormatError("detect: no phase rows in " + features_path);
  }

  const auto quiet = features_from_rows(table, quiet_rows, first_band, n_bands);
  const auto baseline = baseline_stats(quiet);
  auto feats = features_from_rows(table, all_rows, first_band, n_bands);
  std::vector<LabeledFeature> labeled;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    labeled.push_back({std::move(feats[i]), static_cast<bool>(truths[i])});
  }

  CliConfig copy = cli;
  const RunConfig cfg = copy.resolve();
  const RocCurve curve =
      roc_sweep(labeled, baseline, cfg.detection.multiplier_grid(),
                cfg.detection.fraction, cfg.detection.mode);
  const RocPoint op = pick_operating_point(curve);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string domain =
      labeled.front().features.domain == Domain::compressed ? "compressed"
                                                            : "nyquist";
  write_roc_csv(std::filesystem::path(cfg.out_dir) / ("roc_" + domain + ".csv"),
                curve);
  std::cout << "domain " << domain << "\n"
            << "auc " << format_double(curve.auc) << "\n"
            << "operating_multiplier " << format_double(op.multiplier) << "\n"
            << "tpr " << format_double(op.tpr) << "\n"
            << "fpr " << format_double(op.fpr) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed-domain vibration detection and classification "
               "for distributed acoustic sensing"};
  app.set_version_flag("--version", csdas::kVersion);
  app.require_subcommand(1);

  CliConfig cli;
  std::string features_path;
  std::string domain_name = "compressed";
  std::string model_path;

  add_common_options(&app, cli);

  auto* generate = app.add_subcommand(
      "generate", "Synthesize a dataset and write it to --out");

  auto* pipeline = app.add_subcommand(
      "pipeline", "Full two-domain run: features, detection ROC, "
                  "classification CV, report");

  auto* detect_cmd = app.add_subcommand(
      "detect", "Stage-I ROC from a persisted features CSV");
  detect_cmd->add_option("--features", features_path, "features_<domain>.csv")
      ->required();

  auto* classify = app.add_subcommand(
      "classify", "Stage-II cross-validated classification for one domain");
  classify->add_option("--domain", domain_name, "nyquist | compressed")
      ->capture_default_str();
  classify->add_option("--multiplier", cli.multiplier_override,
                       "Detection multiplier; 0 = pick from this run's ROC")
      ->capture_default_str();
  classify->add_option("--save-model", model_path,
                       "Persist the SVM trained on all Stage-II samples");

  auto* sweep = app.add_subcommand(
      "sweep", "OMP reconstruction quality/time over an (mr, k) grid");

  auto* bench = app.add_subcommand(
      "bench", "Time OMP-reconstruct-then-FBE against direct C-FBE");

  for (CLI::App* cmd : {generate, pipeline, detect_cmd, classify, sweep,
                        bench}) {
    cmd->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const RunConfig cfg = cli.resolve();
      csdas::run_generate(cfg, cfg.out_dir);
      csdas::write_manifest(
          cfg, std::filesystem::path(cfg.out_dir) / "run_manifest");
      std::cout << "dataset written to " << cfg.out_dir << "\n";
    } else if (pipeline->parsed()) {
      const RunConfig cfg = cli.resolve();
      const RunReport report = csdas::run_pipeline(cfg);
      std::cout << "reduction_ratio "
                << format_double(report.reduction_ratio) << "\n";
      for (const DomainReport* d :
           {&report.nyquist, &report.compressed}) {
        std::cout << (d->domain == Domain::nyquist ? "nyquist" : "compressed")
                  << ": auc " << format_double(d->roc.auc) << ", overall "
                  << format_double(d->overall_accuracy) << ", 4-class "
                  << format_double(d->event_accuracy) << "\n";
      }
      std::cout << "outputs in " << cfg.out_dir << "\n";
    } else if (detect_cmd->parsed()) {
      return cmd_detect(features_path, cli);
    } else if (classify->parsed()) {
      RunConfig cfg = cli.resolve();
      const Domain domain = domain_name == "nyquist" ? Domain::nyquist
                                                     : Domain::compressed;
      const PipelineContext ctx = csdas::prepare_context(cfg);
      if (cli.multiplier_override > 0.0) {
        // Degenerate one-point grid pins the operating point.
        cfg.detection.grid_lo = cli.multiplier_override;
        cfg.detection.grid_hi = cli.multiplier_override;
        cfg.detection.grid_step = 1.0;
      }
      const DomainRun run = csdas::run_domain(ctx, domain, cfg);
      std::filesystem::create_directories(cfg.out_dir);
      write_confusion_csv(std::filesystem::path(cfg.out_dir) /
                              ("confusion_" + domain_name + ".csv"),
                          run.report.confusion);
      if (!model_path.empty()) {
        Mat x(run.stage2.size(), run.stage2.front().values.size());
        std::vector<int> y;
        for (std::size_t i = 0; i < run.stage2.size(); ++i) {
          x.row(i) = run.stage2[i].values.transpose();
          y.push_back(static_cast<int>(run.stage2[i].label));
        }
        save_model(model_path, train_svm(x, y, cfg.stage2.svm));
      }
      std::cout << "overall " << format_double(run.report.overall_accuracy)
                << ", 4-class " << format_double(run.report.event_accuracy)
                << ", samples " << run.report.stage2_samples << "\n";
    } else if (sweep->parsed()) {
      const RunConfig cfg = cli.resolve();
      const auto cells = csdas::run_sweep(cfg);
      std::cout << cells.size() << " cells written to " << cfg.out_dir
                << "/sweep.csv\n";
    } else if (bench->parsed()) {
      const RunConfig cfg = cli.resolve();
      const auto result = csdas::run_bench(cfg);
      std::cout << "reconstruct_then_fbe "
                << format_double(result.mean_reconstruct_fbe_s)
                << " s/window\n"
                << "direct_cfbe " << format_double(result.mean_cfbe_s)
                << " s/window\n"
                << "speedup " << format_double(result.speedup) << "x\n";
    }
  } catch (const csdas::DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const csdas::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const csdas::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csdas::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
