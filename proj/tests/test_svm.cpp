#include <doctest.h>

#include <filesystem>

#include "csdas/svm.hpp"
#include "helpers.hpp"

using namespace csdas;
using namespace csdas::test;

TEST_CASE("linearly separable points train to full accuracy") {
  Mat x(4, 2);
  x << 0, 0, 0, 1, 3, 3, 3, 4;
  const std::vector<int> y = {0, 0, 1, 1};
  SvmParams params;
  params.kernel = SvmKernel::linear;
  params.c = 10.0;
  const auto model = train_svm(x, y, params);
  CHECK(model.converged);
  CHECK(model.predict(x) == y);
  CHECK(model.pairs.size() == 1);
  for (Eigen::Index i = 0; i < model.pairs[0].dual_coefs.size(); ++i) {
    CHECK(std::abs(model.pairs[0].dual_coefs[i]) <= 10.0 + 1e-9);
  }
}

TEST_CASE("rbf kernel solves xor") {
  Mat x(4, 2);
  x << 0, 0, 1, 1, 0, 1, 1, 0;
  const std::vector<int> y = {0, 0, 1, 1};
  SvmParams params;
  params.c = 10.0;
  params.gamma = 1.0;
  const auto model = train_svm(x, y, params);
  CHECK(model.predict(x) == y);
}

TEST_CASE("duplicating every sample leaves probe predictions unchanged") {
  Rng rng(1);
  Mat x(30, 4);
  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    const int cls = i % 3;
    for (int d = 0; d < 4; ++d) x(i, d) = rng.gaussian(cls * 2.0, 0.4);
    y.push_back(cls);
  }
  SvmParams params;
  const auto base = train_svm(x, y, params);

  Mat x2(60, 4);
  x2 << x, x;
  std::vector<int> y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  const auto doubled = train_svm(x2, y2, params);

  Mat probes(50, 4);
  for (Eigen::Index i = 0; i < probes.size(); ++i) {
    probes.data()[i] = rng.gaussian(2.0, 2.0);
  }
  CHECK(base.predict(probes) == doubled.predict(probes));
}

TEST_CASE("training order permutation does not change probe predictions") {
  Rng rng(2);
  Mat x(40, 3);
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const int cls = i % 2;
    for (int d = 0; d < 3; ++d) x(i, d) = rng.gaussian(cls * 3.0, 0.5);
    y.push_back(cls);
  }
  SvmParams params;
  const auto base = train_svm(x, y, params);

  for (std::uint64_t shuffle_seed : {11ULL, 12ULL}) {
    Rng shuffle(shuffle_seed);
    std::vector<int> order(40);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.uniform_int(i)]);
    }
    Mat xp(40, 3);
    std::vector<int> yp;
    for (int i = 0; i < 40; ++i) {
      xp.row(i) = x.row(order[i]);
      yp.push_back(y[order[i]]);
    }
    const auto shuffled = train_svm(xp, yp, params);
    Mat probes(100, 3);
    Rng prng(3);
    for (Eigen::Index i = 0; i < probes.size(); ++i) {
      probes.data()[i] = prng.gaussian(1.5, 2.0);
    }
    CHECK(base.predict(probes) == shuffled.predict(probes));
  }
}

TEST_CASE("single-class data is rejected; tiny iteration caps are flagged") {
  Mat x(4, 2);
  x << 0, 0, 1, 0, 2, 0, 3, 0;
  CHECK_THROWS_AS(train_svm(x, {1, 1, 1, 1}, SvmParams{}), ParameterError);

  SvmParams capped;
  capped.max_iter = 1;
  const auto model = train_svm(x, {0, 0, 1, 1}, capped);
  CHECK_FALSE(model.converged);
}

TEST_CASE("model save/load round trip preserves decisions") {
  Rng rng(4);
  Mat x(36, 5);
  std::vector<int> y;
  for (int i = 0; i < 36; ++i) {
    const int cls = i % 3;
    for (int d = 0; d < 5; ++d) x(i, d) = rng.gaussian(cls * 1.5, 0.5);
    y.push_back(cls + 7);  // arbitrary label ids survive the round trip
  }
  const auto model = train_svm(x, y, SvmParams{});
  const auto path = std::filesystem::temp_directory_path() / "svm_test.bin";
  save_model(path, model);
  const auto loaded = load_model(path);
  CHECK(loaded.class_ids == model.class_ids);
  CHECK(loaded.gamma == model.gamma);
  Mat probes(80, 5);
  for (Eigen::Index i = 0; i < probes.size(); ++i) {
    probes.data()[i] = rng.gaussian(1.5, 2.0);
  }
  CHECK(loaded.predict(probes) == model.predict(probes));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_model(path), FormatError);
}
