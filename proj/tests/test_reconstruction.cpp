#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "csdas/reconstruction.hpp"
#include "helpers.hpp"

using namespace csdas;
using namespace csdas::test;

TEST_CASE("pearson correlation basics") {
  Rng rng(1);
  const Vec x = random_vec(rng, 50);
  CHECK(pearson_correlation(x, x) == doctest::Approx(1.0));
  CHECK(pearson_correlation(x, Vec(-x)) == doctest::Approx(-1.0));
  CHECK(pearson_correlation(x, Vec(2.0 * x.array() + 3.0)) ==
        doctest::Approx(1.0));
  const Vec y = random_vec(rng, 50);
  CHECK(pearson_correlation(x, y) == pearson_correlation(y, x));
  CHECK_THROWS_AS(pearson_correlation(x, Vec::Ones(50)),
                  DegenerateInputError);
  CHECK_THROWS_AS(pearson_correlation(x, Vec::Ones(10)), ParameterError);
}

TEST_CASE("omp on a zero measurement returns zero") {
  const auto m = make_observation_matrix(
      64, 0.5, 2, MatrixKind::row_orthonormal_gaussian);
  CompressedTrace y;
  y.samples = Vec::Zero(32);
  y.source_n = 64;
  y.matrix_id = m.id();
  const auto res = omp_reconstruct(y, m, 4);
  CHECK(res.reconstructed.samples.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("omp recovers a single conjugate atom pair") {
  Rng rng(3);
  const Trace x = sparse_spectrum_trace(32, rng, 1, false);
  const auto m = make_observation_matrix(
      32, 0.5, 7, MatrixKind::row_orthonormal_gaussian);
  const auto res = omp_reconstruct(compress(m, x), m, 2, &x);
  REQUIRE(res.pcc.has_value());
  CHECK(*res.pcc >= 0.999);
  CHECK(res.k_used == 2);
}

TEST_CASE("omp residual norms never increase and atoms are distinct") {
  Rng rng(4);
  const Trace x = make_trace(random_vec(rng, 64));
  const auto m = make_observation_matrix(
      64, 0.5, 11, MatrixKind::row_orthonormal_gaussian);
  const auto res = omp_reconstruct(compress(m, x), m, 12);
  for (std::size_t i = 1; i < res.residual_norms.size(); ++i) {
    CHECK(res.residual_norms[i] <= res.residual_norms[i - 1] + 1e-12);
  }
  std::vector<int> sorted = res.selected_atoms;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(res.wall_time_s >= 0.0);
}

TEST_CASE("omp parameter errors") {
  const auto m = make_observation_matrix(
      32, 0.5, 5, MatrixKind::row_orthonormal_gaussian);
  Rng rng(5);
  const auto y = compress(m, make_trace(random_vec(rng, 32)));
  CHECK_THROWS_AS(omp_reconstruct(y, m, 17), ParameterError);
  CHECK_THROWS_AS(omp_reconstruct(y, m, 0), ParameterError);
}

TEST_CASE("exact recovery rate for 5-sparse spectra") {
  // N=256, M=128, two conjugate pairs + DC = 5 nonzero coefficients.
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(100 + trial);
    const Trace x = sparse_spectrum_trace(256, rng, 2, true);
    const auto m = make_observation_matrix(
        256, 0.5, 200 + trial, MatrixKind::row_orthonormal_gaussian);
    const auto res = omp_reconstruct(compress(m, x), m, 5, &x);
    if (*res.pcc >= 0.999) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("sweep with complete measurements is lossless") {
  Rng rng(6);
  const Trace x = make_trace(random_vec(rng, 64));
  const auto cells = sweep_reconstruction(x, {1.0}, {64}, 9);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].ok);
  CHECK(cells[0].pcc == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sweep records failed cells and keeps grid order") {
  Rng rng(7);
  const Trace x = make_trace(random_vec(rng, 64));
  // k = 20 exceeds M = 8 at mr = 0.125: that cell fails, the rest succeed.
  const auto cells = sweep_reconstruction(x, {0.125, 0.5}, {4, 20}, 3);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].mr == 0.125);
  CHECK(cells[0].k == 4);
  CHECK(cells[0].ok);
  CHECK_FALSE(cells[1].ok);
  CHECK(cells[1].error.find("omp_reconstruct") != std::string::npos);
  CHECK(cells[2].ok);
  CHECK(cells[3].ok);

  const auto path = std::filesystem::temp_directory_path() / "sweep_test.csv";
  write_sweep_csv(path, cells);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "mr,k,pcc,wall_time_s,status");
  std::string row;
  std::getline(in, row);
  CHECK(row.substr(0, 8) == "0.125,4,");
  std::getline(in, row);
  CHECK(row == "0.125,20,,,failed");
  std::filesystem::remove(path);
}

TEST_CASE("sweep validates its grids") {
  Rng rng(8);
  const Trace x = make_trace(random_vec(rng, 32));
  CHECK_THROWS_AS(sweep_reconstruction(x, {}, {4}, 0), ParameterError);
  CHECK_THROWS_AS(sweep_reconstruction(x, {0.5}, {0}, 0), ParameterError);
  CHECK_THROWS_AS(sweep_reconstruction(x, {1.5}, {4}, 0), ParameterError);
}
