#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace csdas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Bad argument or contract violation at a module boundary. CLI exit code 1.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that is structurally valid but mathematically degenerate
/// (all-zero trace, constant sequence, ...).
class DegenerateInputError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Corrupt or inconsistent persisted data. CLI exit code 2.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (singular solve, conditioning guard). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Modality { phase, intensity };
enum class Domain { nyquist, compressed };

inline const char* to_string(Modality m) {
  return m == Modality::phase ? "phase" : "intensity";
}
inline const char* to_string(Domain d) {
  return d == Domain::nyquist ? "nyquist" : "compressed";
}

/// One channel's Nyquist-domain window: N real samples at a fixed rate.
struct Trace {
  Vec samples;
  double sample_rate_hz = 0.0;
  Modality modality = Modality::phase;

  Eigen::Index size() const { return samples.size(); }

  /// Throws ParameterError unless N >= 2, rate > 0 and all samples finite.
  void validate() const;
};

/// Compressed counterpart of a Trace: M samples, M <= source_n.
struct CompressedTrace {
  Vec samples;
  Eigen::Index source_n = 0;
  std::string matrix_id;
  Modality modality = Modality::phase;

  Eigen::Index size() const { return samples.size(); }
};

}  // namespace csdas
