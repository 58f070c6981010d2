#pragma once

#include "entineq/datum.hpp"
#include "entineq/random.hpp"

#include <gtest/gtest.h>

namespace entineq::testing {

inline Mat mat(Index rows, Index cols, std::initializer_list<double> values) {
  Mat m(rows, cols);
  auto it = values.begin();
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

inline Subspace span(const Mat& columns) { return orthonormalize(columns); }

inline Subspace random_subspace(Index ambient, Index dim, Rng& rng) {
  return orthonormalize(gaussian_matrix(ambient, dim, rng));
}

inline Mat random_symmetric(Index n, Rng& rng) {
  const Mat g = gaussian_matrix(n, n, rng);
  return 0.5 * (g + g.transpose());
}

}  // namespace entineq::testing
