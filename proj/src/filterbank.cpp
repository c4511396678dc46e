#include "csdas/filterbank.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "csdas/fft.hpp"

namespace csdas {
namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

// Estimated 2-norm condition number of a symmetric positive definite matrix,
// via power iteration for the largest eigenvalue and inverse iteration
// (through the Cholesky factor) for the smallest.
double spd_condition_estimate(const Mat& g, const Eigen::LLT<Mat>& llt) {
  Vec v = Vec::Ones(g.rows()).normalized();
  double lmax = 0.0;
  for (int it = 0; it < 30; ++it) {
    v = (g * v).normalized();
  }
  lmax = v.dot(g * v);
  Vec w = Vec::Ones(g.rows()).normalized();
  for (int it = 0; it < 30; ++it) {
    w = llt.solve(w).normalized();
  }
  const double lmin = w.dot(g * w);
  if (!(lmin > 0.0)) return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

// Shared solve context so a 50-band projection factors phi phi^T once.
struct GramSolver {
  bool trivial = false;  // row-orthonormal or identity: (phi phi^T)^{-1} = I
  Eigen::LLT<Mat> llt;

  explicit GramSolver(const ObservationMatrix& matrix) {
    if (matrix.kind != MatrixKind::gaussian) {
      trivial = true;
      return;
    }
    const Mat gram = matrix.entries * matrix.entries.transpose();
    llt.compute(gram);
    double cond = std::numeric_limits<double>::infinity();
    if (llt.info() == Eigen::Success) {
      cond = spd_condition_estimate(gram, llt);
    }
    if (!(cond <= 1e12)) {
      std::ostringstream os;
      os << "project_filter: phi phi^T condition estimate " << cond
         << " exceeds 1e12";
      throw NumericalError(os.str());
    }
  }

  Vec solve(const Vec& v) const { return trivial ? v : llt.solve(v); }
};

Vec project_one(const Vec& f, const ObservationMatrix& matrix,
                const GramSolver& solver) {
  if (f.size() != matrix.n()) {
    throw ParameterError("project_filter: filter length != matrix cols");
  }
  if (matrix.kind == MatrixKind::identity) {
    return f;  // A_c = A, whose first row is f itself
  }
  // first row of phi A phi^T = (phi (A^T r))^T with r = first row of phi,
  // and A^T r is a circular convolution since A's first row is f.
  const Vec r = matrix.entries.row(0).transpose();
  const Vec u = circular_convolve(f, r);
  return solver.solve(matrix.entries * u);
}

}  // namespace

Vec design_bandpass(double sample_rate_hz, double lo_hz, double hi_hz,
                    int taps) {
  if (!(sample_rate_hz > 0.0)) {
    throw ParameterError("design_bandpass: sample rate must be positive");
  }
  if (!(lo_hz >= 0.0) || !(hi_hz > lo_hz) || hi_hz > sample_rate_hz / 2.0) {
    throw ParameterError(
        "design_bandpass: need 0 <= lo < hi <= sample_rate/2");
  }
  if (taps < 3 || taps % 2 == 0) {
    throw ParameterError("design_bandpass: taps must be odd and >= 3");
  }

  const double center = (taps - 1) / 2.0;
  Vec h(taps);
  for (int i = 0; i < taps; ++i) {
    const double x = i - center;
    const double hi_part = 2.0 * hi_hz / sample_rate_hz *
                           sinc(2.0 * hi_hz / sample_rate_hz * x);
    const double lo_part = lo_hz > 0.0
                               ? 2.0 * lo_hz / sample_rate_hz *
                                     sinc(2.0 * lo_hz / sample_rate_hz * x)
                               : 0.0;
    const double window =
        0.54 - 0.46 * std::cos(2.0 * M_PI * i / (taps - 1));
    h[i] = (hi_part - lo_part) * window;
  }

  // Unit gain at the band center (DC for a low-pass). The filter is
  // symmetric, so the response there is real after removing linear phase.
  const double f0 = lo_hz == 0.0 ? 0.0 : 0.5 * (lo_hz + hi_hz);
  double gain = 0.0;
  for (int i = 0; i < taps; ++i) {
    gain += h[i] * std::cos(2.0 * M_PI * f0 / sample_rate_hz * (i - center));
  }
  if (std::abs(gain) < 1e-12) {
    throw NumericalError("design_bandpass: vanishing center gain");
  }
  return h / gain;
}

FilterBank build_filter_bank(double sample_rate_hz, Eigen::Index n,
                             int n_bands, double band_width_hz, int taps) {
  if (n_bands < 1) {
    throw ParameterError("build_filter_bank: n_bands must be >= 1");
  }
  if (n_bands * band_width_hz > sample_rate_hz / 2.0) {
    throw ParameterError(
        "build_filter_bank: bank exceeds the Nyquist frequency");
  }
  if (taps > n) {
    throw ParameterError("build_filter_bank: taps must be <= n");
  }

  FilterBank bank;
  bank.n = n;
  bank.sample_rate_hz = sample_rate_hz;
  bank.taps = taps;
  bank.impulse_responses = Mat::Zero(n_bands, n);
  bank.frequency_responses.resize(n_bands, n);
  bank.abs_frequency_responses.resize(n_bands, n);
  for (int b = 0; b < n_bands; ++b) {
    BandSpec spec{b * band_width_hz, (b + 1) * band_width_hz, b};
    const Vec h =
        design_bandpass(sample_rate_hz, spec.lo_hz, spec.hi_hz, taps);
    bank.impulse_responses.row(b).head(taps) = h.transpose();
    const CVec f = fft_unitary(Vec(bank.impulse_responses.row(b)));
    bank.frequency_responses.row(b) = f.transpose();
    bank.abs_frequency_responses.row(b) = f.cwiseAbs().transpose();
    bank.bands.push_back(spec);
  }
  return bank;
}

Vec circulant_apply(const Vec& impulse_response, const Vec& x) {
  if (impulse_response.size() != x.size()) {
    throw ParameterError("circulant_apply: length mismatch");
  }
  return circular_correlate(impulse_response, x);
}

Vec project_filter(const Vec& impulse_response,
                   const ObservationMatrix& matrix) {
  GramSolver solver(matrix);
  return project_one(impulse_response, matrix, solver);
}

CompressedFilterBank project_filter_bank(const FilterBank& bank,
                                         const ObservationMatrix& matrix) {
  if (bank.n != matrix.n()) {
    throw ParameterError("project_filter_bank: bank length != matrix cols");
  }
  GramSolver solver(matrix);

  CompressedFilterBank out;
  out.bands = bank.bands;
  out.matrix_id = matrix.id();
  out.m = matrix.m();
  const auto nb = bank.band_count();
  out.compressed_impulse_responses.resize(nb, out.m);
  out.compressed_frequency_responses.resize(nb, out.m);
  out.abs_compressed_frequency_responses.resize(nb, out.m);
  for (Eigen::Index b = 0; b < nb; ++b) {
    Vec fc;
    try {
      fc = project_one(Vec(bank.impulse_responses.row(b)), matrix, solver);
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << "band " << b << ": " << e.what();
      throw NumericalError(os.str());
    }
    out.compressed_impulse_responses.row(b) = fc.transpose();
    const CVec f = fft_unitary(fc);
    out.compressed_frequency_responses.row(b) = f.transpose();
    out.abs_compressed_frequency_responses.row(b) = f.cwiseAbs().transpose();
  }
  return out;
}

}  // namespace csdas
