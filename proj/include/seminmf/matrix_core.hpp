#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace seminmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error taxonomy shared by the library. The CLI maps these onto exit codes.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Threshold used wherever a norm appears in a denominator.
/// Denominators smaller than `epsilon` are replaced by `epsilon`.
struct EpsilonPolicy {
  double epsilon = 1e-10;

  constexpr EpsilonPolicy() = default;
  explicit EpsilonPolicy(double eps);
};

/// Elementwise positive and negative parts: source == positive - negative.
struct SignSplit {
  Matrix positive;
  Matrix negative;
};

/// Throws DataError unless every entry is finite and the matrix is non-empty.
void require_valid(const Matrix& m, const std::string& what);

bool all_finite(const Matrix& m);

/// Sum over columns of the Euclidean column norms.
double l21_norm(const Matrix& m);

double frobenius_norm(const Matrix& m);

/// Euclidean norm of every column, summed in row order.
Vector column_norms(const Matrix& m);

SignSplit split_signs(const Matrix& m);

/// 1 / max(x, epsilon); x is expected to be a nonnegative norm.
inline double guarded_reciprocal(double x, EpsilonPolicy policy = {}) {
  return 1.0 / (x < policy.epsilon ? policy.epsilon : x);
}

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

/// ||X - U V^T||_{2,1} / ||X||_{2,1}. Throws DegenerateError when X == 0.
double relative_error(const Matrix& x, const Matrix& u, const Matrix& v);

}  // namespace seminmf
