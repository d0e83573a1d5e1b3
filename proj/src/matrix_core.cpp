#include "seminmf/matrix_core.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace seminmf {

EpsilonPolicy::EpsilonPolicy(double eps) : epsilon(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("epsilon must be positive and finite");
  }
}

bool all_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) return false;
    }
  }
  return true;
}

void require_valid(const Matrix& m, const std::string& what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw DataError(what + ": matrix must have at least one row and one column");
  }
  if (!all_finite(m)) {
    throw DataError(what + ": matrix contains NaN or Inf");
  }
}

Vector column_norms(const Matrix& m) {
  Vector out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
    out(j) = std::sqrt(s);
  }
  return out;
}

double l21_norm(const Matrix& m) {
  const Vector norms = column_norms(m);
  double total = 0.0;
  for (Index j = 0; j < norms.size(); ++j) total += norms(j);
  return total;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
  }
  return std::sqrt(s);
}

SignSplit split_signs(const Matrix& m) {
  SignSplit out{Matrix(m.rows(), m.cols()), Matrix(m.rows(), m.cols())};
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double a = m(i, j);
      // (|a| + a) / 2 and (|a| - a) / 2, written so that positive - negative == a exactly.
      out.positive(i, j) = a > 0.0 ? a : 0.0;
      out.negative(i, j) = a < 0.0 ? -a : 0.0;
    }
  }
  return out;
}

std::string format_real(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

double relative_error(const Matrix& x, const Matrix& u, const Matrix& v) {
  if (u.rows() != x.rows() || v.rows() != x.cols() || u.cols() != v.cols()) {
    throw DimensionError("relative_error: X, U, V dimensions do not conform");
  }
  const double denom = l21_norm(x);
  if (!(denom > 0.0)) {
    throw DegenerateError("relative_error: ||X||_{2,1} is zero");
  }
  const Matrix residual = x - u * v.transpose();
  return l21_norm(residual) / denom;
}

}  // namespace seminmf
