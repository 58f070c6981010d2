#include "entineq/lemma.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace entineq {

namespace {

Mat psd_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  // Rounding noise on zero eigenvalues would otherwise surface as O(1e-8) roots.
  const double floor = 1e-13 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const Vec root = es.eigenvalues().unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Mat random_psd_block(Index n, Rng& rng, double drop_rate) {
  std::uniform_real_distribution<double> spectrum(0.05, 3.0);
  std::bernoulli_distribution drop(drop_rate);
  const Mat q = random_orthogonal(n, rng);
  Vec lambda(n);
  for (Index r = 0; r < n; ++r) lambda(r) = drop(rng) ? 0.0 : spectrum(rng);
  return q * lambda.asDiagonal() * q.transpose();
}

Mat block_diag(const Datum& datum, const std::vector<Mat>& blocks) {
  const Index total = datum.total_dim();
  Mat a = Mat::Zero(total, total);
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    a.block(datum.offset(i), datum.offset(i), ni, ni) = blocks[static_cast<std::size_t>(i)];
  }
  return a;
}

}  // namespace

PinnedBlockPsd PinnedBlockPsd::from_matrix(const Datum& datum, const Mat& a) {
  const Index total = datum.total_dim();
  if (a.rows() != total || a.cols() != total) throw std::invalid_argument("pinned matrix must be N x N");
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
    throw std::invalid_argument("pinned matrix is not positive semidefinite");
  PinnedBlockPsd out;
  out.a = sym;
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    out.blocks.push_back(sym.block(datum.offset(i), datum.offset(i), ni, ni));
  }
  return out;
}

bool PinnedBlockPsd::block_diagonal(double tol) const {
  Mat off = a;
  Index at = 0;
  for (const auto& b : blocks) {
    off.block(at, at, b.rows(), b.cols()).setZero();
    at += b.rows();
  }
  return off.norm() <= tol * std::max(1.0, a.norm());
}

PinnedBlockPsd random_block_diagonal_psd(const Datum& datum, Rng& rng) {
  std::vector<Mat> blocks;
  for (Index ni : datum.n) blocks.push_back(random_psd_block(ni, rng, 0.0));
  return PinnedBlockPsd::from_matrix(datum, block_diag(datum, blocks));
}

PinnedBlockPsd random_pinned_psd(const Datum& datum, const std::vector<Mat>& blocks, Rng& rng) {
  const Index total = datum.total_dim();
  if (static_cast<Index>(blocks.size()) != datum.k()) throw std::invalid_argument("one block per coordinate");
  const Mat r = gaussian_matrix(total, total + 2, rng);
  const Mat g = r * r.transpose();
  std::vector<Mat> norm, roots;
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    norm.push_back(inv_sqrtm_pd(PdMat(Mat(g.block(datum.offset(i), datum.offset(i), ni, ni)))).matrix());
    roots.push_back(psd_sqrt(blocks[static_cast<std::size_t>(i)]));
  }
  const Mat scale = block_diag(datum, roots) * block_diag(datum, norm);
  Mat a = scale * g * scale.transpose();
  // Pin the diagonal blocks exactly.
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    a.block(datum.offset(i), datum.offset(i), ni, ni) = blocks[static_cast<std::size_t>(i)];
  }
  return PinnedBlockPsd::from_matrix(datum, a);
}

PinnedBlockPsd random_commuting_psd(const Datum& datum, const StructureReport& report, Rng& rng) {
  const Index total = datum.total_dim();
  std::uniform_real_distribution<double> scale(0.2, 3.0);
  Mat a = Mat::Zero(total, total);
  for (const auto& part : report.critical_parts) a += scale(rng) * part.space.projector();
  for (const auto& ind : report.independents) {
    const Mat& v = ind.space.basis();
    a += v * random_psd_block(v.cols(), rng, 0.25) * v.transpose();
  }
  return PinnedBlockPsd::from_matrix(datum, a);
}

LemmaResult lemma_matrix_inequality_test(const Datum& datum, const PinnedBlockPsd& pinned) {
  LemmaResult out;
  const Mat& a = pinned.a;
  for (Index i = 0; i < datum.k(); ++i) {
    const Mat& ai = pinned.blocks[static_cast<std::size_t>(i)];
    out.lhs += datum.c[static_cast<std::size_t>(i)] * (ai - Mat::Identity(ai.rows(), ai.cols())).squaredNorm();
  }
  const Mat a2 = a * a;
  const Index total = datum.total_dim();
  for (Index j = 0; j < datum.m(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const Mat& b = datum.B[ju];
    const Mat root = psd_sqrt(b * a2 * b.transpose());
    out.rhs += datum.d[ju] * (root - Mat::Identity(b.rows(), b.rows())).squaredNorm();
    const Mat pj = target_subspace(datum, j).projector();
    out.residuals.push_back(((Mat::Identity(total, total) - pj) * a * pj).norm());
  }
  out.gap = out.lhs - out.rhs;
  out.equality = out.gap <= 1e-8 * (1.0 + out.lhs);
  out.block_diagonal = pinned.block_diagonal();

  const double spectral = std::max(0.0, Eigen::SelfAdjointEigenSolver<Mat>(a, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
  for (Index j = 0; j < datum.m(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double r = out.residuals[ju];
    if (spectral > 0.0) out.lower_bound += datum.d[ju] * r * r / spectral;
    out.upper_bound += 2.0 * datum.d[ju] * std::sqrt(static_cast<double>(datum.p[ju])) * r;
  }
  const double slack = 1e-9 * (1.0 + out.lhs);
  if (out.block_diagonal) {
    out.iff_consistent = out.gap >= out.lower_bound - slack && out.gap <= out.upper_bound + slack;
  } else {
    const double worst = out.residuals.empty() ? 0.0 : *std::max_element(out.residuals.begin(), out.residuals.end());
    out.iff_consistent = out.equality == (worst <= 1e-8);
  }
  return out;
}

void lemma_battery_draw(const Datum& datum, const StructureReport& report, std::uint64_t seed, std::size_t idx,
                        LemmaResult& commuting, LemmaResult& generic) {
  Rng rng = make_rng(seed, Stream::pinned_psd, idx);
  commuting = lemma_matrix_inequality_test(datum, random_commuting_psd(datum, report, rng));
  generic = lemma_matrix_inequality_test(datum, random_block_diagonal_psd(datum, rng));
}

void lemma_battery_tally(LemmaBattery& acc, const LemmaResult& commuting, const LemmaResult& generic) {
  for (const LemmaResult* r : {&commuting, &generic}) {
    ++acc.draws;
    if (r->gap < -1e-9) ++acc.violations;
    acc.min_gap = acc.draws == 1 ? r->gap : std::min(acc.min_gap, r->gap);
    if (!r->iff_consistent) ++acc.iff_inconsistent;
  }
  ++acc.commuting_draws;
  const double worst = commuting.residuals.empty()
                           ? 0.0
                           : *std::max_element(commuting.residuals.begin(), commuting.residuals.end());
  if (commuting.equality && worst <= 1e-8) ++acc.commuting_equal;
  ++acc.generic_draws;
  if (!generic.equality) ++acc.generic_strict;
}

LemmaBattery lemma_battery(const Datum& datum, std::size_t draws, std::uint64_t seed) {
  const StructureReport report = extremizer_report(datum);
  std::vector<LemmaResult> commuting(draws), generic(draws);
  const auto n = static_cast<std::int64_t>(draws);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    lemma_battery_draw(datum, report, seed, u, commuting[u], generic[u]);
  }
  LemmaBattery acc;
  acc.generic_applicable =
      std::any_of(datum.p.begin(), datum.p.end(), [&](Index pj) { return pj < datum.total_dim(); });
  for (std::size_t u = 0; u < draws; ++u) lemma_battery_tally(acc, commuting[u], generic[u]);
  return acc;
}

std::size_t pinned_violations(const Datum& datum, std::size_t draws, std::uint64_t seed) {
  std::size_t count = 0;
  const auto n = static_cast<std::int64_t>(draws);
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : count)
  for (std::int64_t idx = 0; idx < n; ++idx) {
    Rng rng = make_rng(seed, Stream::pinned_psd, static_cast<std::uint64_t>(idx) + (std::uint64_t{1} << 40));
    const PinnedBlockPsd diag = random_block_diagonal_psd(datum, rng);
    const LemmaResult r = lemma_matrix_inequality_test(datum, random_pinned_psd(datum, diag.blocks, rng));
    if (r.gap < -1e-9) ++count;
  }
  return count;
}

}  // namespace entineq
