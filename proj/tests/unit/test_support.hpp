#pragma once

#include "seminmf/matrix_core.hpp"
#include "seminmf/random.hpp"

#include <cmath>
#include <cstdint>

namespace testing_support {

using seminmf::Index;
using seminmf::Matrix;

inline Matrix uniform_matrix(Index rows, Index cols, double lo, double hi, std::uint64_t seed) {
  seminmf::Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testing_support
