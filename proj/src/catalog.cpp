#include "entineq/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace entineq::catalog {

Datum shannon_stam(double lambda, Index n) {
  Datum d;
  d.n = {n, n};
  d.c = {lambda, 1.0 - lambda};
  d.p = {n};
  d.d = {1.0};
  Mat b(n, 2 * n);
  b << std::sqrt(lambda) * Mat::Identity(n, n), std::sqrt(1.0 - lambda) * Mat::Identity(n, n);
  d.B = {b};
  return d;
}

Datum toy(double lambda) {
  Datum d;
  d.n = {2, 1};
  d.c = {lambda, 1.0 - lambda};
  d.p = {1, 1};
  d.d = {lambda, 1.0};
  Mat b1(1, 3);
  b1 << 1.0, 0.0, 0.0;
  Mat b2(1, 3);
  b2 << 0.0, std::sqrt(lambda), std::sqrt(1.0 - lambda);
  d.B = {b1, b2};
  return d;
}

Datum identity(Index n) {
  Datum d;
  d.n = {n};
  d.c = {1.0};
  d.p = {n};
  d.d = {1.0};
  d.B = {Mat::Identity(n, n)};
  return d;
}

Datum zamir_feder(const Mat& b) {
  Datum d;
  for (Index i = 0; i < b.cols(); ++i) {
    d.n.push_back(1);
    d.c.push_back(b.col(i).squaredNorm());
  }
  d.p = {b.rows()};
  d.d = {1.0};
  d.B = {b};
  return d;
}

Datum zamir_feder_example() {
  const double s = 1.0 / std::sqrt(2.0);
  Mat b(2, 3);
  b << 1.0, 0.0, 0.0, 0.0, s, s;
  return zamir_feder(b);
}

Datum three_map(double c1, double c2, double d1, double d2, double d3) {
  Datum d;
  d.n = {2, 1};
  d.c = {c1, c2};
  d.p = {2, 1, 1};
  d.d = {d1, d2, d3};
  Mat b1(2, 3);
  b1 << 1, 0, 1, 0, 1, 1;
  Mat b2(1, 3);
  b2 << 1, 0, 0;
  Mat b3(1, 3);
  b3 << 0, 1, 0;
  d.B = {b1, b2, b3};
  return d;
}

Datum kernel_witness() {
  Datum d;
  d.n = {2};
  d.c = {1.0};
  d.p = {1};
  d.d = {1.0};
  Mat b(1, 2);
  b << 1.0, 0.0;
  d.B = {b};
  return d;
}

Datum kernel_witness_scaled() {
  Datum d = kernel_witness();
  d.c = {0.5};
  return d;
}

Datum scaling_violating() {
  Datum d = shannon_stam(0.5, 1);
  d.d = {2.0};
  return d;
}

std::vector<std::pair<std::string, Datum>> geometric_corpus() {
  return {
      {"shannon_stam_quarter", shannon_stam(0.25, 1)},
      {"shannon_stam_half", shannon_stam(0.5, 1)},
      {"shannon_stam_half_n2", shannon_stam(0.5, 2)},
      {"toy_half", toy(0.5)},
      {"identity_3", identity(3)},
      {"zamir_feder", zamir_feder_example()},
  };
}

Datum random_geometric(Rng& rng, const RandomGeometricOptions& options) {
  std::uniform_int_distribution<Index> pick_k(1, options.max_k);
  std::uniform_int_distribution<Index> pick_block(1, options.max_block);
  std::uniform_real_distribution<double> pick_weight(0.25, 1.0);

  Datum d;
  const Index k = pick_k(rng);
  for (Index i = 0; i < k; ++i) d.n.push_back(pick_block(rng));
  d.c.assign(static_cast<std::size_t>(k), 0.0);
  const Index total = d.total_dim();

  std::uniform_int_distribution<Index> pick_frames(1, options.max_frames);
  const Index frames = pick_frames(rng);
  for (Index f = 0; f < frames && d.m() < options.max_maps; ++f) {
    // The first frame covers every block so each c_i is positive.
    std::vector<Index> blocks;
    if (f == 0) {
      for (Index i = 0; i < k; ++i) blocks.push_back(i);
    } else {
      std::bernoulli_distribution coin(0.6);
      for (Index i = 0; i < k; ++i)
        if (coin(rng)) blocks.push_back(i);
      if (blocks.empty()) blocks.push_back(std::uniform_int_distribution<Index>(0, k - 1)(rng));
    }
    Index dim = 0;
    for (Index i : blocks) dim += d.n[static_cast<std::size_t>(i)];
    const Mat q = random_orthogonal(dim, rng);
    const double w = pick_weight(rng);

    const Index room = options.max_maps - d.m();
    const Index groups = std::uniform_int_distribution<Index>(1, std::min({dim, Index{3}, room}))(rng);
    // Split rows 0..dim-1 into `groups` nonempty consecutive pieces.
    std::vector<Index> cuts;
    for (Index g = 1; g < dim; ++g) cuts.push_back(g);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(static_cast<std::size_t>(groups - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), 0);
    cuts.push_back(dim);

    for (std::size_t g = 0; g + 1 < cuts.size(); ++g) {
      const Index rows = cuts[g + 1] - cuts[g];
      Mat b = Mat::Zero(rows, total);
      Index local = 0;
      for (Index i : blocks) {
        const Index ni = d.n[static_cast<std::size_t>(i)];
        b.middleCols(d.offset(i), ni) = q.block(cuts[g], local, rows, ni);
        local += ni;
      }
      d.B.push_back(std::move(b));
      d.p.push_back(rows);
      d.d.push_back(w);
    }
    for (Index i : blocks) d.c[static_cast<std::size_t>(i)] += w;
  }
  return d;
}

Equivalence random_equivalence(const Datum& datum, Rng& rng, double spread) {
  Equivalence e;
  for (Index pj : datum.p) e.a.push_back(Mat::Identity(pj, pj) + spread * gaussian_matrix(pj, pj, rng) / std::sqrt(double(pj)));
  for (Index ni : datum.n) e.c.push_back(Mat::Identity(ni, ni) + spread * gaussian_matrix(ni, ni, rng) / std::sqrt(double(ni)));
  return e;
}

}  // namespace entineq::catalog
