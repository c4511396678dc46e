#include <doctest.h>

#include <Eigen/Dense>

#include "csdas/fft.hpp"
#include "csdas/filterbank.hpp"
#include "helpers.hpp"

using namespace csdas;
using namespace csdas::test;

namespace {

// RMS gain of a filter on a sinusoid, measured by actually applying it.
double measured_gain(const Vec& h, Eigen::Index n, double hz, double fs) {
  Vec padded = Vec::Zero(n);
  padded.head(h.size()) = h;
  const Trace s = sinusoid(n, hz, fs);
  const Vec filtered = circulant_apply(padded, s.samples);
  return std::sqrt(filtered.squaredNorm() / s.samples.squaredNorm());
}

}  // namespace

TEST_CASE("full-band low-pass keeps white-noise energy") {
  const Vec h = design_bandpass(10000.0, 0.0, 5000.0, 511);
  Rng rng(1);
  Vec x = random_vec(rng, 4096);
  Vec padded = Vec::Zero(4096);
  padded.head(h.size()) = h;
  const Vec filtered = circulant_apply(padded, x);
  CHECK(filtered.squaredNorm() >= 0.99 * x.squaredNorm());
}

TEST_CASE("narrow band-pass gains, 511 taps") {
  const Vec h = design_bandpass(10000.0, 90.0, 120.0, 511);
  const double pass = measured_gain(h, 8000, 105.0, 10000.0);
  CHECK(pass >= 0.7);
  CHECK(pass <= 1.1);
  const double stop = measured_gain(h, 8000, 400.0, 10000.0);
  CHECK(20.0 * std::log10(pass / stop) >= 20.0);
}

TEST_CASE("low-pass DC gain is the coefficient sum") {
  const Vec h = design_bandpass(10000.0, 0.0, 30.0, 511);
  CHECK(h.sum() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("design_bandpass parameter errors") {
  CHECK_THROWS_AS(design_bandpass(10000.0, 90.0, 120.0, 510), ParameterError);
  CHECK_THROWS_AS(design_bandpass(10000.0, 90.0, 6000.0, 511), ParameterError);
  CHECK_THROWS_AS(design_bandpass(10000.0, 120.0, 90.0, 511), ParameterError);
}

TEST_CASE("default bank tiles 0-1500 Hz in 30 Hz bands") {
  const auto bank = build_filter_bank(10000.0, 8000);
  REQUIRE(bank.band_count() == 50);
  CHECK(bank.bands.front().lo_hz == 0.0);
  CHECK(bank.bands.back().lo_hz == 1470.0);
  CHECK(bank.bands.back().hi_hz == 1500.0);
  for (std::size_t i = 0; i + 1 < bank.bands.size(); ++i) {
    CHECK(bank.bands[i].hi_hz == bank.bands[i + 1].lo_hz);
  }
  // frequency responses are the DFTs of the padded impulse responses
  const CVec f0 = fft_unitary(Vec(bank.impulse_responses.row(0)));
  CHECK((f0 - bank.frequency_responses.row(0).transpose()).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("degenerate single-band bank") {
  const auto bank = build_filter_bank(10000.0, 2048, 1, 5000.0, 511);
  CHECK(bank.band_count() == 1);
  CHECK(bank.bands[0].hi_hz == 5000.0);
}

TEST_CASE("bank parameter errors") {
  CHECK_THROWS_AS(build_filter_bank(10000.0, 8000, 60, 100.0, 511),
                  ParameterError);
  CHECK_THROWS_AS(build_filter_bank(10000.0, 256, 50, 30.0, 511),
                  ParameterError);
}

TEST_CASE("circulant apply: impulse and shift") {
  Rng rng(2);
  const Vec x = random_vec(rng, 16);
  Vec e0 = Vec::Zero(16);
  e0[0] = 1.0;
  CHECK((circulant_apply(e0, x) - x).cwiseAbs().maxCoeff() <= 1e-12);

  Vec e1 = Vec::Zero(16);
  e1[1] = 1.0;
  const Vec shifted = circulant_apply(e1, x);
  for (Eigen::Index i = 0; i < 16; ++i) {
    CHECK(shifted[i] == doctest::Approx(x[(i + 1) % 16]).epsilon(1e-12));
  }
}

TEST_CASE("circulant apply matches the explicit matrix oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec f = random_vec(rng, 8);
    const Vec x = random_vec(rng, 8);
    const Vec fast = circulant_apply(f, x);
    const Vec slow = circulant_oracle(f) * x;
    CHECK((fast - slow).norm() <= 1e-9 * slow.norm());
  }
  CHECK_THROWS_AS(circulant_apply(Vec::Ones(4), Vec::Ones(5)),
                  ParameterError);
}

TEST_CASE("identity projection returns the filter exactly") {
  const auto id = make_observation_matrix(32, 1.0, 0, MatrixKind::identity);
  Rng rng(4);
  const Vec f = random_vec(rng, 32);
  CHECK(project_filter(f, id) == f);
}

TEST_CASE("projecting the identity filter gives the impulse back") {
  const auto m = make_observation_matrix(
      16, 0.5, 3, MatrixKind::row_orthonormal_gaussian);
  Vec e0 = Vec::Zero(16);
  e0[0] = 1.0;
  const Vec fc = project_filter(e0, m);
  Vec expected = Vec::Zero(8);
  expected[0] = 1.0;
  CHECK((fc - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("row-space property of the projected operator") {
  // A_c phi x = phi A x for x in the row space of phi (row-orthonormal).
  Rng rng(5);
  const auto m = make_observation_matrix(
      16, 0.5, 21, MatrixKind::row_orthonormal_gaussian);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec f = random_vec(rng, 16);
    const Mat a = circulant_oracle(f);
    const Mat ac = m.entries * a * m.entries.transpose();  // (phi phi^T) = I
    for (int zs = 0; zs < 50; ++zs) {
      const Vec z = random_vec(rng, 8);
      const Vec x = m.entries.transpose() * z;
      const Vec lhs = ac * (m.entries * x);
      const Vec rhs = m.entries * (a * x);
      CHECK((lhs - rhs).norm() <= 1e-6 * rhs.norm());
    }
  }
}

TEST_CASE("project_filter matches the materialized first row") {
  Rng rng(6);
  for (MatrixKind kind :
       {MatrixKind::gaussian, MatrixKind::row_orthonormal_gaussian}) {
    const auto m = make_observation_matrix(24, 0.5, 33, kind);
    const Vec f = random_vec(rng, 24);
    const Mat a = circulant_oracle(f);
    const Mat gram = m.entries * m.entries.transpose();
    const Mat ac =
        m.entries * a * m.entries.transpose() * gram.inverse();
    const Vec fc = project_filter(f, m);
    CHECK((fc.transpose() - ac.row(0)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("projection is linear in the filter") {
  Rng rng(7);
  const auto m = make_observation_matrix(
      32, 0.25, 9, MatrixKind::row_orthonormal_gaussian);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec f = random_vec(rng, 32);
    const Vec g = random_vec(rng, 32);
    const double a = rng.uniform(-2.0, 2.0);
    const double b = rng.uniform(-2.0, 2.0);
    const Vec lhs = project_filter(a * f + b * g, m);
    const Vec rhs = a * project_filter(f, m) + b * project_filter(g, m);
    CHECK((lhs - rhs).norm() <= 1e-9 * (rhs.norm() + 1e-30));
  }
}

TEST_CASE("self-consistency: circulant of f_c re-extracts f_c") {
  Rng rng(8);
  const auto m = make_observation_matrix(
      32, 0.25, 10, MatrixKind::row_orthonormal_gaussian);
  const Vec fc = project_filter(random_vec(rng, 32), m);
  CHECK(Vec(circulant_oracle(fc).row(0)) == fc);
}

TEST_CASE("projected bank shapes, ids and determinism") {
  const auto bank = build_filter_bank(10000.0, 800, 50, 30.0, 511);
  const auto m = make_observation_matrix(
      800, 0.3, 7, MatrixKind::row_orthonormal_gaussian);
  const auto cbank = project_filter_bank(bank, m);
  CHECK(cbank.band_count() == 50);
  CHECK(cbank.m == 240);
  CHECK(cbank.matrix_id == m.id());
  const auto again = project_filter_bank(bank, m);
  CHECK(cbank.compressed_impulse_responses ==
        again.compressed_impulse_responses);

  const auto other = make_observation_matrix(
      640, 0.3, 7, MatrixKind::row_orthonormal_gaussian);
  CHECK_THROWS_AS(project_filter_bank(bank, other), ParameterError);
}

TEST_CASE("identity-matrix bank projection is the identity") {
  const auto bank = build_filter_bank(10000.0, 256, 4, 30.0, 101);
  const auto id = make_observation_matrix(256, 1.0, 0, MatrixKind::identity);
  const auto cbank = project_filter_bank(bank, id);
  CHECK(cbank.compressed_impulse_responses == bank.impulse_responses);
}
