#include <doctest.h>

#include <filesystem>
#include <set>

#include "csdas/classification.hpp"
#include "csdas/csv.hpp"
#include "csdas/fft.hpp"
#include "helpers.hpp"

using namespace csdas;
using namespace csdas::test;

namespace {

FeatureVector fv(Vec e, Modality mod, Domain domain = Domain::nyquist) {
  FeatureVector f;
  f.band_energies = std::move(e);
  f.modality = mod;
  f.domain = domain;
  return f;
}

}  // namespace

TEST_CASE("normalize_concat peaks each block at one") {
  Vec p(3);
  p << 2, 4, 1;
  Vec i(3);
  i << 0, 5, 10;
  const auto sf = normalize_concat(fv(p, Modality::phase),
                                   fv(i, Modality::intensity));
  CHECK(sf.values.size() == 6);
  CHECK(sf.values.head(3).maxCoeff() == 1.0);
  CHECK(sf.values.tail(3).maxCoeff() == 1.0);
  CHECK(sf.values[0] == 0.5);
}

TEST_CASE("normalize_concat passes all-zero blocks through") {
  const auto sf = normalize_concat(fv(Vec::Zero(50), Modality::phase),
                                   fv(Vec::Zero(50), Modality::intensity));
  CHECK(sf.values.size() == 100);
  CHECK(sf.values.allFinite());
  CHECK(sf.values == Vec::Zero(100));
}

TEST_CASE("normalize_concat validates its pair") {
  CHECK_THROWS_AS(normalize_concat(fv(Vec::Ones(50), Modality::phase),
                                   fv(Vec::Ones(40), Modality::intensity)),
                  ParameterError);
  CHECK_THROWS_AS(normalize_concat(fv(Vec::Ones(50), Modality::intensity),
                                   fv(Vec::Ones(50), Modality::phase)),
                  ParameterError);
}

TEST_CASE("stacked values stay within the unit interval") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    Vec p(50), i(50);
    for (int b = 0; b < 50; ++b) {
      p[b] = rng.uniform(0.0, 100.0);
      i[b] = rng.uniform(0.0, 100.0);
    }
    const auto sf = normalize_concat(fv(p, Modality::phase),
                                     fv(i, Modality::intensity));
    CHECK(sf.values.minCoeff() >= 0.0);
    CHECK(sf.values.maxCoeff() <= 1.0);
  }
}

TEST_CASE("zero time shift is the identity") {
  Rng rng(2);
  const Vec x = random_vec(rng, 1000);
  const Vec out = apply_augment(
      x, 10000.0, AugmentChoice{AugmentMethod::time_shift, 0.0});
  CHECK(out == x);
}

TEST_CASE("time shift is circular") {
  Rng rng(3);
  const Vec x = random_vec(rng, 1000);
  const Vec out = apply_augment(
      x, 10000.0, AugmentChoice{AugmentMethod::time_shift, 0.01});  // 100 samples
  for (int i = 0; i < 1000; ++i) {
    CHECK(out[(i + 100) % 1000] == x[i]);
  }
}

TEST_CASE("speed stretch preserves length and scales frequency") {
  const Trace t = sinusoid(8000, 400.0, 10000.0);
  for (double factor : {0.9, 1.1}) {
    const Vec out = apply_augment(
        t.samples, 10000.0, AugmentChoice{AugmentMethod::speed_stretch, factor});
    REQUIRE(out.size() == 8000);
    Eigen::Index peak = 0;
    fft_unitary(out).cwiseAbs().head(4000).maxCoeff(&peak);
    const double got_hz = static_cast<double>(peak) * 10000.0 / 8000.0;
    CHECK(got_hz == doctest::Approx(400.0 * factor).epsilon(0.02));
  }
}

TEST_CASE("pitch change scales frequency without touching duration") {
  const Trace t = sinusoid(8000, 600.0, 10000.0);
  const Vec out = apply_augment(
      t.samples, 10000.0, AugmentChoice{AugmentMethod::pitch_change, 1.1});
  REQUIRE(out.size() == 8000);
  Eigen::Index peak = 0;
  fft_unitary(out).cwiseAbs().head(4000).maxCoeff(&peak);
  CHECK(static_cast<double>(peak) * 10000.0 / 8000.0 ==
        doctest::Approx(660.0).epsilon(0.02));
}

namespace {

LabeledClip two_channel_clip(std::uint64_t seed) {
  LabeledClip clip;
  clip.clip_id = "c";
  clip.label = ClassLabel::WD;
  clip.sample_rate_hz = 10000.0;
  clip.duration_s = 0.1;
  Rng rng(seed);
  for (int ch = 0; ch < 2; ++ch) {
    clip.phase.push_back(make_trace(random_vec(rng, 1000)));
    clip.intensity.push_back(
        make_trace(random_vec(rng, 1000), 10000.0, Modality::intensity));
  }
  return clip;
}

}  // namespace

TEST_CASE("augment yields n_copies labeled copies, applied identically") {
  const auto clip = two_channel_clip(4);
  const auto copies = augment(clip, 9, 77);
  CHECK(copies.size() == 9);  // 160 originals + 9x160 copies = 1600 total
  for (const auto& copy : copies) {
    CHECK(copy.label == clip.label);
    CHECK(copy.phase.size() == 2);
    CHECK(copy.phase[0].samples.size() == 1000);
    CHECK(copy.clip_id.substr(0, 1) == "c");
  }
  // identical choice per copy across channels and modalities: a copy that
  // time-shifts must shift phase and intensity by the same amount
  const auto choice0 = draw_augment_choice(77, 0);
  const Vec expect_phase =
      apply_augment(clip.phase[1].samples, 10000.0, choice0);
  CHECK(copies[0].phase[1].samples == expect_phase);
  const Vec expect_int =
      apply_augment(clip.intensity[0].samples, 10000.0, choice0);
  CHECK(copies[0].intensity[0].samples == expect_int);
  // deterministic
  const auto again = augment(clip, 9, 77);
  CHECK(again[4].phase[0].samples == copies[4].phase[0].samples);
}

TEST_CASE("four class accuracy from hand confusion matrices") {
  ConfusionMatrix diag;
  for (ClassLabel c : diag.class_order) diag.at(c, c) = 10;
  CHECK(four_class_accuracy(diag) == 1.0);
  CHECK(diag.overall_accuracy() == 1.0);

  ConfusionMatrix th_as_en;
  th_as_en.at(ClassLabel::TH, ClassLabel::EN) = 10;
  th_as_en.at(ClassLabel::WD, ClassLabel::WD) = 10;
  th_as_en.at(ClassLabel::JH, ClassLabel::JH) = 10;
  th_as_en.at(ClassLabel::SH, ClassLabel::SH) = 10;
  CHECK(four_class_accuracy(th_as_en) == doctest::Approx(0.75));

  ConfusionMatrix hand;
  hand.at(ClassLabel::TH, ClassLabel::TH) = 8;
  hand.at(ClassLabel::TH, ClassLabel::EN) = 2;
  hand.at(ClassLabel::WD, ClassLabel::WD) = 10;
  hand.at(ClassLabel::JH, ClassLabel::JH) = 10;
  hand.at(ClassLabel::SH, ClassLabel::SH) = 10;
  hand.at(ClassLabel::EN, ClassLabel::TH) = 5;
  hand.at(ClassLabel::EN, ClassLabel::EN) = 5;
  CHECK(four_class_accuracy(hand) == doctest::Approx(0.95));
}

TEST_CASE("confusion csv carries class names in header and rows") {
  ConfusionMatrix cm;
  cm.at(ClassLabel::TH, ClassLabel::WD) = 3;
  const auto path =
      std::filesystem::temp_directory_path() / "confusion_test.csv";
  write_confusion_csv(path, cm);
  const auto table = read_csv(path);
  CHECK(table.header ==
        std::vector<std::string>{"class", "TH", "WD", "JH", "SH", "EN"});
  CHECK(table.rows[0][0] == "TH");
  CHECK(table.rows[0][2] == "3");
  std::filesystem::remove(path);
}

namespace {

// Separable 5-class toy set: class c peaks at coordinate c.
std::vector<StackedFeature> toy_dataset(int clips_per_class, int per_clip,
                                        std::uint64_t seed) {
  std::vector<StackedFeature> out;
  Rng rng(seed);
  const ClassLabel labels[] = {ClassLabel::TH, ClassLabel::WD, ClassLabel::JH,
                               ClassLabel::SH, ClassLabel::EN};
  for (int li = 0; li < 5; ++li) {
    for (int c = 0; c < clips_per_class; ++c) {
      for (int w = 0; w < per_clip; ++w) {
        StackedFeature sf;
        sf.values = Vec::Zero(100);
        for (int d = 0; d < 100; ++d) sf.values[d] = 0.05 * rng.uniform();
        sf.values[li] += 1.0;
        sf.values[50 + li] += 1.0;
        sf.label = labels[li];
        sf.source_clip_id =
            std::string(to_string(labels[li])) + std::to_string(c);
        sf.window_index = w;
        out.push_back(std::move(sf));
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("cross validation on separable data is perfect and exhaustive") {
  const auto data = toy_dataset(8, 5, 1);  // 5 classes x 8 clips x 5 windows
  CvOptions options;
  options.folds = 4;
  options.seed = 3;
  const auto res = cross_validate(data, options);
  CHECK(res.accuracy == 1.0);
  CHECK(res.confusion.total() == 200);  // every sample tested exactly once
  for (ClassLabel c : res.confusion.class_order) {
    long row = 0;
    for (ClassLabel p : res.confusion.class_order) row += res.confusion.at(c, p);
    CHECK(row == 40);  // per-class test counts
  }
}

TEST_CASE("augmented samples train but are never tested") {
  auto data = toy_dataset(6, 2, 2);
  // poison-pill augmented copies: wrong values, right labels; if any were
  // tested, accuracy could not stay perfect on the originals only
  std::vector<StackedFeature> augmented;
  for (const auto& sf : data) {
    StackedFeature copy = sf;
    copy.augmented = true;
    copy.values = Vec::Constant(100, 0.5);
    augmented.push_back(copy);
  }
  data.insert(data.end(), augmented.begin(), augmented.end());
  CvOptions options;
  options.folds = 3;
  options.seed = 4;
  const auto res = cross_validate(data, options);
  CHECK(res.confusion.total() == 60);  // originals only
}

TEST_CASE("cross validation rejects classes with fewer clips than folds") {
  const auto data = toy_dataset(3, 2, 5);
  CvOptions options;
  options.folds = 4;
  CHECK_THROWS_AS(cross_validate(data, options), ParameterError);
}

TEST_CASE("phase-only ablation uses the leading feature block") {
  const auto data = toy_dataset(6, 3, 6);
  CvOptions options;
  options.folds = 3;
  options.seed = 7;
  options.feature_cols = 50;
  const auto res = cross_validate(data, options);
  CHECK(res.accuracy == 1.0);  // toy classes separable in the phase block
}
