#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "csdas/rng.hpp"
#include "csdas/types.hpp"

namespace csdas::test {

// Brute-force circulant with first row f and every row rotated one to the
// right: A[i][j] = f[(j - i) mod n]. The implementation under test never
// materializes this matrix; the tests compare against it directly.
inline Mat circulant_oracle(const Vec& f) {
  const auto n = f.size();
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = f[((j - i) % n + n) % n];
    }
  }
  return a;
}

// O(n^2) unitary DFT by direct summation.
inline CVec dft_oracle(const Vec& x) {
  const auto n = x.size();
  CVec out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double angle = -2.0 * M_PI * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

inline Vec random_vec(Rng& rng, Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

inline Trace make_trace(Vec samples, double fs = 10000.0,
                        Modality modality = Modality::phase) {
  return Trace{std::move(samples), fs, modality};
}

// Real sinusoid trace at frequency hz.
inline Trace sinusoid(Eigen::Index n, double hz, double fs,
                      double phase = 0.0) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = std::sin(2.0 * M_PI * hz * static_cast<double>(i) / fs + phase);
  }
  return make_trace(std::move(v), fs);
}

// Real trace with an exactly sparse unitary-DFT spectrum: `pairs` conjugate
// bin pairs plus an optional DC term.
inline Trace sparse_spectrum_trace(Eigen::Index n, Rng& rng, int pairs,
                                   bool with_dc) {
  CVec spec = CVec::Zero(n);
  std::vector<Eigen::Index> bins;
  while (bins.size() < static_cast<std::size_t>(pairs)) {
    const auto b =
        static_cast<Eigen::Index>(1 + rng.uniform_int(n / 2 - 1));
    if (std::find(bins.begin(), bins.end(), b) == bins.end()) {
      bins.push_back(b);
    }
  }
  for (const auto b : bins) {
    const std::complex<double> c(rng.gaussian(), rng.gaussian());
    spec[b] = c;
    spec[n - b] = std::conj(c);
  }
  if (with_dc) spec[0] = rng.gaussian();
  // x = Psi s with Psi the inverse unitary DFT: evaluate by direct sum.
  Vec x = Vec::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (spec[k] == std::complex<double>(0.0, 0.0)) continue;
      const double angle = 2.0 * M_PI * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
      acc += spec[k] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    x[t] = (acc / std::sqrt(static_cast<double>(n))).real();
  }
  return make_trace(std::move(x));
}

inline double spearman_rho(const std::vector<double>& a,
                           const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    for (std::size_t i = 0; i < idx.size(); ++i) {
      r[idx[i]] = static_cast<double>(i);
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n - 1.0) / 2.0;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  return num / std::sqrt(da * db);
}

}  // namespace csdas::test
