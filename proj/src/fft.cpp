#include "csdas/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace csdas {
namespace {

// FFTW plan creation is not thread safe; execution on distinct buffers is.
// One in-place c2c plan per (size, sign), reused via fftw_execute_dft.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  void execute(std::complex<double>* data, int n, int sign) {
    fftw_plan plan = nullptr;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto key = std::make_pair(n, sign);
      auto it = plans_.find(key);
      if (it == plans_.end()) {
        // Dummy buffer for planning; FFTW_ESTIMATE does not touch it.
        std::vector<std::complex<double>> tmp(n);
        plan = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(tmp.data()),
            reinterpret_cast<fftw_complex*>(tmp.data()), sign, FFTW_ESTIMATE);
        plans_[key] = plan;
      } else {
        plan = it->second;
      }
    }
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

CVec transform(const CVec& in, int sign) {
  CVec out = in;
  PlanCache::instance().execute(out.data(), static_cast<int>(out.size()), sign);
  out *= 1.0 / std::sqrt(static_cast<double>(in.size()));
  return out;
}

}  // namespace

CVec fft_unitary(const CVec& in) { return transform(in, FFTW_FORWARD); }

CVec ifft_unitary(const CVec& in) { return transform(in, FFTW_BACKWARD); }

CVec fft_unitary(const Vec& in) {
  CVec c(in.size());
  c.real() = in;
  c.imag().setZero();
  return fft_unitary(c);
}

Vec ifft_unitary_real(const CVec& in) { return ifft_unitary(in).real(); }

Vec circular_correlate(const Vec& f, const Vec& x) {
  if (f.size() != x.size()) {
    throw ParameterError("circular_correlate: length mismatch");
  }
  const CVec prod =
      fft_unitary(f).conjugate().cwiseProduct(fft_unitary(x)) *
      std::sqrt(static_cast<double>(f.size()));
  return ifft_unitary_real(prod);
}

Vec circular_convolve(const Vec& f, const Vec& x) {
  if (f.size() != x.size()) {
    throw ParameterError("circular_convolve: length mismatch");
  }
  const CVec prod = fft_unitary(f).cwiseProduct(fft_unitary(x)) *
                    std::sqrt(static_cast<double>(f.size()));
  return ifft_unitary_real(prod);
}

}  // namespace csdas
