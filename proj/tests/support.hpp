#pragma once

#include <cmath>
#include <initializer_list>

#include "lgb/spd.hpp"

namespace lgb::test {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline SpdMatrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return SpdMatrix::diagonal(v);
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1e-300, want.norm());
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace lgb::test
