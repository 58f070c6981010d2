#include "entineq/datum.hpp"

#include "entineq/random.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace entineq {

Index Datum::total_dim() const { return std::accumulate(n.begin(), n.end(), Index{0}); }

Index Datum::offset(Index i) const {
  return std::accumulate(n.begin(), n.begin() + i, Index{0});
}

Mat Datum::restricted(Index j, Index i) const {
  return B[static_cast<std::size_t>(j)].middleCols(offset(i), n[static_cast<std::size_t>(i)]);
}

std::vector<std::string> validate(const Datum& datum) {
  std::vector<std::string> out;
  if (datum.n.empty()) out.emplace_back("no source spaces (k = 0)");
  if (datum.B.empty()) out.emplace_back("no target maps (m = 0)");
  if (datum.c.size() != datum.n.size()) out.emplace_back("c has wrong length");
  if (datum.d.size() != datum.B.size() || datum.p.size() != datum.B.size())
    out.emplace_back("d, p and B disagree on m");
  for (std::size_t i = 0; i < datum.n.size(); ++i)
    if (datum.n[i] < 1) out.emplace_back("source dimension n[" + std::to_string(i) + "] < 1");
  for (std::size_t i = 0; i < datum.c.size(); ++i)
    if (!(datum.c[i] > 0.0) || !std::isfinite(datum.c[i]))
      out.emplace_back("nonpositive exponent c[" + std::to_string(i) + "]");
  for (std::size_t j = 0; j < datum.d.size(); ++j)
    if (!(datum.d[j] > 0.0) || !std::isfinite(datum.d[j]))
      out.emplace_back("nonpositive exponent d[" + std::to_string(j) + "]");
  if (!out.empty()) return out;

  const Index total = datum.total_dim();
  for (std::size_t j = 0; j < datum.B.size(); ++j) {
    const Mat& b = datum.B[j];
    const std::string tag = "B[" + std::to_string(j) + "]";
    if (datum.p[j] < 1) {
      out.push_back("target dimension p[" + std::to_string(j) + "] < 1");
      continue;
    }
    if (b.rows() != datum.p[j] || b.cols() != total) {
      out.push_back("shape mismatch in " + tag);
      continue;
    }
    if (!b.allFinite()) {
      out.push_back("non-finite entry in " + tag);
      continue;
    }
    if (numerical_rank(b) < datum.p[j]) out.push_back("row-deficient map " + tag);
  }
  return out;
}

void require_valid(const Datum& datum) {
  const auto issues = validate(datum);
  if (issues.empty()) return;
  std::ostringstream os;
  os << "invalid datum:";
  for (const auto& s : issues) os << ' ' << s << ';';
  throw InvalidDatum(os.str());
}

ScalingCheck scaling_check(const Datum& datum) {
  double src = 0.0;
  double dst = 0.0;
  for (std::size_t i = 0; i < datum.n.size(); ++i) src += datum.c[i] * static_cast<double>(datum.n[i]);
  for (std::size_t j = 0; j < datum.p.size(); ++j) dst += datum.d[j] * static_cast<double>(datum.p[j]);
  const double defect = src - dst;
  return {std::abs(defect) <= 1e-9 * src, defect};
}

Subspace ProductSubspace::embedded(const Datum& datum) const {
  check_conforms(datum);
  const Index total = datum.total_dim();
  Index r = 0;
  for (const auto& part : parts) r += part.dim();
  Mat basis = Mat::Zero(total, r);
  Index col = 0;
  for (Index i = 0; i < datum.k(); ++i) {
    const auto& part = parts[static_cast<std::size_t>(i)];
    basis.block(datum.offset(i), col, part.ambient(), part.dim()) = part.basis();
    col += part.dim();
  }
  return Subspace::from_orthonormal(std::move(basis));
}

void ProductSubspace::check_conforms(const Datum& datum) const {
  if (static_cast<Index>(parts.size()) != datum.k())
    throw InvalidDatum("product subspace: wrong number of parts");
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i].ambient() != datum.n[i]) throw InvalidDatum("product subspace: part dimension mismatch");
}

ProductSubspace ProductSubspace::zero(const Datum& datum) {
  ProductSubspace t;
  for (Index ni : datum.n) t.parts.emplace_back(ni);
  return t;
}

ProductSubspace ProductSubspace::full(const Datum& datum) {
  ProductSubspace t;
  for (Index ni : datum.n) t.parts.push_back(Subspace::full(ni));
  return t;
}

BlockPd::BlockPd(std::vector<PdMat> blocks) : blocks_(std::move(blocks)) {}

BlockPd BlockPd::identity(const Datum& datum) {
  std::vector<PdMat> blocks;
  for (Index ni : datum.n) blocks.push_back(PdMat::identity(ni));
  return BlockPd(std::move(blocks));
}

Mat BlockPd::assemble() const {
  Index total = 0;
  for (const auto& b : blocks_) total += b.dim();
  Mat k = Mat::Zero(total, total);
  Index off = 0;
  for (const auto& b : blocks_) {
    k.block(off, off, b.dim(), b.dim()) = b.matrix();
    off += b.dim();
  }
  return k;
}

double BlockPd::frobenius() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.matrix().squaredNorm();
  return std::sqrt(s);
}

double BlockPd::max_condition() const {
  double c = 1.0;
  for (const auto& b : blocks_) c = std::max(c, b.condition());
  return c;
}

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
  }
  return "?";
}

CriticalityCheck criticality_check(const Datum& datum, const ProductSubspace& t) {
  t.check_conforms(datum);
  CriticalityCheck out;
  Index r = 0;
  for (Index i = 0; i < datum.k(); ++i) {
    const Index dim_i = t.parts[static_cast<std::size_t>(i)].dim();
    out.lhs += datum.c[static_cast<std::size_t>(i)] * static_cast<double>(dim_i);
    r += dim_i;
  }
  for (Index j = 0; j < datum.m(); ++j) {
    if (r == 0) break;
    Mat image_cols(datum.p[static_cast<std::size_t>(j)], r);
    Index col = 0;
    for (Index i = 0; i < datum.k(); ++i) {
      const auto& part = t.parts[static_cast<std::size_t>(i)];
      image_cols.middleCols(col, part.dim()) = datum.restricted(j, i) * part.basis();
      col += part.dim();
    }
    const auto ju = static_cast<std::size_t>(j);
    out.rhs += datum.d[ju] * static_cast<double>(numerical_rank(image_cols, std::nullopt, datum.B[ju].norm()));
  }
  const double tol = 1e-9 * std::max({1.0, std::abs(out.lhs), std::abs(out.rhs)});
  const double diff = out.lhs - out.rhs;
  out.kind = diff > tol ? Criticality::supercritical
             : diff < -tol ? Criticality::subcritical
                           : Criticality::critical;
  return out;
}

ProductSubspace coordinate_subspace(const Datum& datum, std::uint64_t mask) {
  ProductSubspace t;
  Index bit = 0;
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    std::vector<Index> axes;
    for (Index a = 0; a < ni; ++a, ++bit)
      if (mask & (std::uint64_t{1} << bit)) axes.push_back(a);
    Mat basis = Mat::Zero(ni, static_cast<Index>(axes.size()));
    for (std::size_t col = 0; col < axes.size(); ++col) basis(axes[col], static_cast<Index>(col)) = 1.0;
    t.parts.push_back(Subspace::from_orthonormal(std::move(basis)));
  }
  return t;
}

namespace {

constexpr std::size_t kStructuredComboCap = std::size_t{1} << 16;

}  // namespace

ProductSubspace random_product_subspace(const Datum& datum, Rng& rng) {
  ProductSubspace t;
  for (Index ni : datum.n) {
    std::uniform_int_distribution<Index> rank(0, ni);
    const Index r = rank(rng);
    t.parts.push_back(r == 0 ? Subspace(ni) : orthonormalize(gaussian_matrix(ni, r, rng)));
  }
  return t;
}

namespace {

void add_unique(std::vector<Subspace>& list, Subspace s) {
  for (const auto& existing : list)
    if (same_subspace(existing, s)) return;
  list.push_back(std::move(s));
}

}  // namespace

std::vector<std::vector<Subspace>> structured_candidate_parts(const Datum& datum) {
  const Index m = datum.m();
  std::vector<Subspace> full_kernels;
  for (Index j = 0; j < m; ++j) full_kernels.push_back(kernel(datum.B[static_cast<std::size_t>(j)]));

  std::vector<std::vector<Subspace>> out;
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    const Index off = datum.offset(i);
    std::vector<Subspace> cands;
    add_unique(cands, Subspace(ni));
    add_unique(cands, Subspace::full(ni));
    for (Index j = 0; j < m; ++j) {
      const Mat bji = datum.restricted(j, i);
      const Subspace ker = kernel(bji, datum.B[static_cast<std::size_t>(j)].norm());
      add_unique(cands, ker);
      add_unique(cands, complement(ker));
      // coordinate projection of ker(B_j)
      const Mat proj = full_kernels[static_cast<std::size_t>(j)].basis().middleRows(off, ni);
      const Subspace pk = orthonormalize(proj, std::nullopt, 1.0);
      add_unique(cands, pk);
      add_unique(cands, complement(pk));
    }
    // Intersections of restricted kernels over subsets of maps.
    if (m <= 10) {
      for (std::uint64_t s = 1; s < (std::uint64_t{1} << m); ++s) {
        if (std::popcount(s) < 2) continue;
        Index rows = 0;
        for (Index j = 0; j < m; ++j)
          if (s & (std::uint64_t{1} << j)) rows += datum.p[static_cast<std::size_t>(j)];
        Mat stacked(rows, ni);
        Index r = 0;
        double scale = 0.0;
        for (Index j = 0; j < m; ++j) {
          if (!(s & (std::uint64_t{1} << j))) continue;
          const Index pj = datum.p[static_cast<std::size_t>(j)];
          stacked.middleRows(r, pj) = datum.restricted(j, i);
          scale = std::max(scale, datum.B[static_cast<std::size_t>(j)].norm());
          r += pj;
        }
        const Subspace ker = kernel(stacked, scale);
        if (!ker.is_zero()) add_unique(cands, ker);
      }
    }
    out.push_back(std::move(cands));
  }
  return out;
}

std::pair<std::size_t, bool> structured_combination_count(const std::vector<std::vector<Subspace>>& parts) {
  std::size_t combos = 1;
  for (const auto& c : parts) {
    if (combos > kStructuredComboCap / c.size()) return {kStructuredComboCap, true};
    combos *= c.size();
  }
  return {combos, false};
}

ProductSubspace structured_combination(const std::vector<std::vector<Subspace>>& parts, std::size_t idx,
                                       bool capped, std::uint64_t seed) {
  ProductSubspace t;
  if (capped) {
    Rng rng = make_rng(seed, Stream::dimension_structured, idx);
    for (const auto& c : parts) {
      std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
      t.parts.push_back(c[pick(rng)]);
    }
  } else {
    std::size_t rest = idx;
    for (const auto& c : parts) {
      t.parts.push_back(c[rest % c.size()]);
      rest /= c.size();
    }
  }
  return t;
}

namespace {

std::optional<DimensionWitness> check_candidate(const Datum& datum, ProductSubspace t, const char* stage) {
  const auto check = criticality_check(datum, t);
  if (check.kind != Criticality::supercritical) return std::nullopt;
  return DimensionWitness{std::move(t), check.lhs, check.rhs, stage};
}

// Runs body(index) for index in [0, count) in parallel and returns the
// witness with the smallest index, independent of the schedule.
template <typename Body>
std::optional<DimensionWitness> first_witness(std::size_t count, Body&& body) {
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
  std::vector<std::optional<DimensionWitness>> found(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    if (u > best.load(std::memory_order_relaxed)) continue;
    auto w = body(u);
    if (w) {
      found[u] = std::move(w);
      std::size_t cur = best.load();
      while (u < cur && !best.compare_exchange_weak(cur, u)) {
      }
    }
  }
  const std::size_t b = best.load();
  if (b == std::numeric_limits<std::size_t>::max()) return std::nullopt;
  return std::move(found[b]);
}

}  // namespace

DimensionCheck dimension_check_sampled(const Datum& datum, std::size_t trials, std::uint64_t seed) {
  require_valid(datum);
  DimensionCheck out;
  const Index total = datum.total_dim();

  if (total <= kCoordinateEnumerationCap) {
    out.exhaustive_coordinates = true;
    const std::size_t count = std::size_t{1} << total;
    out.candidates += count;
    out.witness = first_witness(count, [&](std::size_t mask) {
      return check_candidate(datum, coordinate_subspace(datum, mask), "coordinate");
    });
    if (out.witness) return out;
  }

  out.candidates += trials;
  out.witness = first_witness(trials, [&](std::size_t t) {
    Rng rng = make_rng(seed, Stream::dimension_random, t);
    return check_candidate(datum, random_product_subspace(datum, rng), "random");
  });
  if (out.witness) return out;

  const auto cands = structured_candidate_parts(datum);
  const auto [combos, capped] = structured_combination_count(cands);
  out.candidates += combos;
  out.witness = first_witness(combos, [&](std::size_t idx) {
    return check_candidate(datum, structured_combination(cands, idx, capped, seed), "structured");
  });
  return out;
}

namespace {

Mat checked_inverse(const Mat& a, const std::string& what) {
  if (a.rows() != a.cols()) throw InvalidDatum(what + " is not square");
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec& s = svd.singularValues();
  if (s.size() == 0) return a;
  if (!(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) > 1e12) throw InvalidDatum(what + " is singular");
  return a.fullPivLu().inverse();
}

}  // namespace

Datum apply_equivalence(const Datum& datum, std::span<const Mat> a, std::span<const Mat> cblocks) {
  require_valid(datum);
  if (static_cast<Index>(a.size()) != datum.m() || static_cast<Index>(cblocks.size()) != datum.k())
    throw InvalidDatum("apply_equivalence: wrong number of transforms");
  const Index total = datum.total_dim();
  Mat cinv = Mat::Zero(total, total);
  for (Index i = 0; i < datum.k(); ++i) {
    const auto& ci = cblocks[static_cast<std::size_t>(i)];
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    if (ci.rows() != ni) throw InvalidDatum("apply_equivalence: C_" + std::to_string(i) + " has wrong size");
    cinv.block(datum.offset(i), datum.offset(i), ni, ni) = checked_inverse(ci, "C_" + std::to_string(i));
  }
  Datum out = datum;
  for (Index j = 0; j < datum.m(); ++j) {
    const auto& aj = a[static_cast<std::size_t>(j)];
    if (aj.rows() != datum.p[static_cast<std::size_t>(j)])
      throw InvalidDatum("apply_equivalence: A_" + std::to_string(j) + " has wrong size");
    out.B[static_cast<std::size_t>(j)] =
        checked_inverse(aj, "A_" + std::to_string(j)) * datum.B[static_cast<std::size_t>(j)] * cinv;
  }
  return out;
}

double GeometricCheck::max_residual() const {
  double r = 0.0;
  for (double x : source_residuals) r = std::max(r, x);
  for (double x : target_residuals) r = std::max(r, x);
  return r;
}

GeometricCheck is_geometric(const Datum& datum, double tol) {
  require_valid(datum);
  GeometricCheck out;
  for (Index j = 0; j < datum.m(); ++j) {
    const Mat& b = datum.B[static_cast<std::size_t>(j)];
    out.target_residuals.push_back((b * b.transpose() - Mat::Identity(b.rows(), b.rows())).norm());
  }
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    Mat acc = -datum.c[static_cast<std::size_t>(i)] * Mat::Identity(ni, ni);
    for (Index j = 0; j < datum.m(); ++j) {
      const Mat bji = datum.restricted(j, i);
      acc += datum.d[static_cast<std::size_t>(j)] * bji.transpose() * bji;
    }
    out.source_residuals.push_back(acc.norm());
  }
  out.geometric = out.max_residual() <= tol;
  return out;
}

Subspace source_subspace(const Datum& datum, Index i) {
  return embed(Subspace::full(datum.n[static_cast<std::size_t>(i)]), datum.total_dim(), datum.offset(i));
}

Subspace target_subspace(const Datum& datum, Index j) {
  return image(datum.B[static_cast<std::size_t>(j)].transpose());
}

}  // namespace entineq
