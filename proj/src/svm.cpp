#include "csdas/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "csdas/csv.hpp"

namespace csdas {
namespace {

constexpr double kTau = 1e-12;

double resolve_gamma(const Mat& x, const SvmParams& params) {
  if (params.gamma > 0.0) return params.gamma;
  // Mean per-feature variance: between-feature mean offsets carry no
  // class information and must not dilate the kernel length scale.
  const Vec mean = x.colwise().mean();
  const double var =
      (x.rowwise() - mean.transpose()).squaredNorm() /
      static_cast<double>(x.rows() * x.cols());
  if (!(var > 0.0)) return 1.0;
  return 1.0 / (static_cast<double>(x.cols()) * var);
}

Mat kernel_matrix(const Mat& x, SvmKernel kernel, double gamma) {
  Mat k = x * x.transpose();
  if (kernel == SvmKernel::linear) return k;
  const Vec sq = k.diagonal();
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      k(i, j) = std::exp(-gamma * (sq[i] + sq[j] - 2.0 * k(i, j)));
    }
  }
  return k;
}

struct BinaryProblem {
  Mat x;
  Vec y;  // +1 / -1
};

// SMO with first-order maximal-violating-pair selection (the LIBSVM
// working-set rule without the second-order refinement).
struct SmoResult {
  Vec alpha;
  double bias = 0.0;
  bool converged = false;
};

SmoResult smo_solve(const BinaryProblem& prob, const SvmParams& params,
                    double gamma) {
  const Eigen::Index n = prob.x.rows();
  const Mat k = kernel_matrix(prob.x, params.kernel, gamma);
  const double c = params.c;
  const Vec& y = prob.y;

  Vec alpha = Vec::Zero(n);
  Vec grad = Vec::Constant(n, -1.0);  // gradient of the dual objective
  SmoResult result;

  long iter = 0;
  double m_up = 0.0, m_low = 0.0;
  while (iter < params.max_iter) {
    int i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
      const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
      if (in_up && v > m_up) {
        m_up = v;
        i = static_cast<int>(t);
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = static_cast<int>(t);
      }
    }
    if (i < 0 || j < 0 || m_up - m_low <= params.tol) {
      result.converged = (i >= 0 && j >= 0) || n == 0;
      break;
    }

    const double quad =
        std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), kTau);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }

    const double dai = (alpha[i] - old_ai) * y[i];
    const double daj = (alpha[j] - old_aj) * y[j];
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[t] += y[t] * (k(t, i) * dai + k(t, j) * daj);
    }
    ++iter;
  }
  if (iter >= params.max_iter) {
    result.converged = false;
  }

  // Bias from the free support vectors; midpoint of the violation interval
  // when every multiplier sits on a bound.
  double sum = 0.0;
  int free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha[t] > kTau && alpha[t] < c - kTau) {
      sum += -y[t] * grad[t];
      ++free_count;
    }
  }
  result.bias = free_count > 0 ? sum / free_count : 0.5 * (m_up + m_low);
  result.alpha = std::move(alpha);
  return result;
}

}  // namespace

double SvmModel::decision(const BinarySvm& pair, const Vec& x) const {
  double f = pair.bias;
  for (Eigen::Index s = 0; s < pair.support_vectors.rows(); ++s) {
    double kk = 0.0;
    if (params.kernel == SvmKernel::linear) {
      kk = pair.support_vectors.row(s).dot(x);
    } else {
      kk = std::exp(-gamma * (pair.support_vectors.row(s).transpose() - x)
                                .squaredNorm());
    }
    f += pair.dual_coefs[s] * kk;
  }
  return f;
}

int SvmModel::predict(const Vec& x) const {
  std::vector<int> votes(class_ids.size(), 0);
  std::vector<double> margin(class_ids.size(), 0.0);
  for (const auto& pair : pairs) {
    const double f = decision(pair, x);
    if (f > 0) {
      votes[pair.class_a]++;
    } else {
      votes[pair.class_b]++;
    }
    margin[pair.class_a] += f;
    margin[pair.class_b] -= f;
  }
  int best = 0;
  for (std::size_t i = 1; i < votes.size(); ++i) {
    if (votes[i] > votes[best] ||
        (votes[i] == votes[best] && margin[i] > margin[best])) {
      best = static_cast<int>(i);
    }
  }
  return class_ids[best];
}

std::vector<int> SvmModel::predict(const Mat& x_rows) const {
  std::vector<int> out;
  out.reserve(x_rows.rows());
  for (Eigen::Index r = 0; r < x_rows.rows(); ++r) {
    out.push_back(predict(Vec(x_rows.row(r).transpose())));
  }
  return out;
}

SvmModel train_svm(const Mat& x_rows, const std::vector<int>& labels,
                   const SvmParams& params) {
  if (static_cast<Eigen::Index>(labels.size()) != x_rows.rows()) {
    throw ParameterError("train_svm: label count != row count");
  }
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw ParameterError("train_svm: need at least two classes");
  }
  if (!(params.c > 0.0)) {
    throw ParameterError("train_svm: C must be positive");
  }

  SvmModel model;
  model.params = params;
  model.gamma = resolve_gamma(x_rows, params);
  model.class_ids.assign(distinct.begin(), distinct.end());

  const int nc = static_cast<int>(model.class_ids.size());
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index t = 0; t < x_rows.rows(); ++t) {
        if (labels[t] == model.class_ids[a] ||
            labels[t] == model.class_ids[b]) {
          rows.push_back(t);
        }
      }
      BinaryProblem prob;
      prob.x.resize(rows.size(), x_rows.cols());
      prob.y.resize(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        prob.x.row(r) = x_rows.row(rows[r]);
        prob.y[r] = labels[rows[r]] == model.class_ids[a] ? 1.0 : -1.0;
      }

      const SmoResult sol = smo_solve(prob, params, model.gamma);
      if (!sol.converged) model.converged = false;

      BinarySvm pair;
      pair.class_a = a;
      pair.class_b = b;
      std::vector<Eigen::Index> svs;
      for (Eigen::Index t = 0; t < prob.x.rows(); ++t) {
        if (sol.alpha[t] > kTau) svs.push_back(t);
      }
      pair.support_vectors.resize(svs.size(), x_rows.cols());
      pair.dual_coefs.resize(svs.size());
      for (std::size_t s = 0; s < svs.size(); ++s) {
        pair.support_vectors.row(s) = prob.x.row(svs[s]);
        pair.dual_coefs[s] = sol.alpha[svs[s]] * prob.y[svs[s]];
      }
      pair.bias = sol.bias;
      model.pairs.push_back(std::move(pair));
    }
  }
  return model;
}

void save_model(const std::filesystem::path& path, const SvmModel& model) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + tmp);
    out << "csdas-svm v1\n";
    out << "kernel " << (model.params.kernel == SvmKernel::rbf ? "rbf" : "linear")
        << "\n";
    out << "c " << format_double(model.params.c) << "\n";
    out << "gamma " << format_double(model.gamma) << "\n";
    out << "tol " << format_double(model.params.tol) << "\n";
    out << "converged " << (model.converged ? 1 : 0) << "\n";
    out << "classes";
    for (int id : model.class_ids) out << ' ' << id;
    out << "\n";
    out << "pairs " << model.pairs.size() << "\n";
    for (const auto& pair : model.pairs) {
      out << "pair " << pair.class_a << ' ' << pair.class_b << ' '
          << pair.support_vectors.rows() << ' ' << pair.support_vectors.cols()
          << "\n";
      // Raw little-endian doubles (native on every supported target).
      out.write(reinterpret_cast<const char*>(pair.support_vectors.data()),
                sizeof(double) * pair.support_vectors.size());
      out.write(reinterpret_cast<const char*>(pair.dual_coefs.data()),
                sizeof(double) * pair.dual_coefs.size());
      out.write(reinterpret_cast<const char*>(&pair.bias), sizeof(double));
    }
    if (!out) throw FormatError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string expect_key(std::istream& in, const std::string& key) {
  std::string k;
  if (!(in >> k) || k != key) {
    throw FormatError("svm model: expected '" + key + "'");
  }
  std::string rest;
  std::getline(in, rest);
  return rest.empty() ? rest : rest.substr(1);
}

}  // namespace

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != "csdas-svm v1") {
    throw FormatError("svm model: bad magic line");
  }
  SvmModel model;
  const std::string kernel = expect_key(in, "kernel");
  if (kernel == "rbf") {
    model.params.kernel = SvmKernel::rbf;
  } else if (kernel == "linear") {
    model.params.kernel = SvmKernel::linear;
  } else {
    throw FormatError("svm model: unknown kernel '" + kernel + "'");
  }
  model.params.c = parse_double(expect_key(in, "c"), "svm model c");
  model.gamma = parse_double(expect_key(in, "gamma"), "svm model gamma");
  model.params.gamma = model.gamma;
  model.params.tol = parse_double(expect_key(in, "tol"), "svm model tol");
  model.converged = expect_key(in, "converged") == "1";
  {
    std::istringstream cls(expect_key(in, "classes"));
    int id;
    while (cls >> id) model.class_ids.push_back(id);
    if (model.class_ids.size() < 2) {
      throw FormatError("svm model: fewer than two classes");
    }
  }
  const long n_pairs = parse_long(expect_key(in, "pairs"), "svm model pairs");
  for (long p = 0; p < n_pairs; ++p) {
    std::string tag;
    long a, b, rows, cols;
    if (!(in >> tag >> a >> b >> rows >> cols) || tag != "pair") {
      throw FormatError("svm model: bad pair header");
    }
    in.ignore(1);  // newline before the binary block
    BinarySvm pair;
    pair.class_a = static_cast<int>(a);
    pair.class_b = static_cast<int>(b);
    pair.support_vectors.resize(rows, cols);
    pair.dual_coefs.resize(rows);
    in.read(reinterpret_cast<char*>(pair.support_vectors.data()),
            sizeof(double) * rows * cols);
    in.read(reinterpret_cast<char*>(pair.dual_coefs.data()),
            sizeof(double) * rows);
    in.read(reinterpret_cast<char*>(&pair.bias), sizeof(double));
    if (!in) throw FormatError("svm model: truncated pair block");
    model.pairs.push_back(std::move(pair));
  }
  return model;
}

}  // namespace csdas
