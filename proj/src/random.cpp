#include "entineq/random.hpp"

#include <cmath>

namespace entineq {

Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

Mat gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat g(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) g(r, c) = normal(rng);
  return g;
}

Mat random_orthogonal(Index n, Rng& rng) {
  const Mat g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

Mat random_spd(Index n, double cond, Rng& rng) {
  const Mat q = random_orthogonal(n, rng);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double log_cond = std::log(cond);
  Vec lambda(n);
  for (Index i = 0; i < n; ++i) lambda(i) = std::exp(u(rng) * log_cond);
  Mat a = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

}  // namespace entineq
