#include "entineq/structure.hpp"

#include <omp.h>

#include <algorithm>
#include <tuple>
#include <sstream>

namespace entineq {

namespace {

constexpr double kNullEigenvalue = 1e-10;

std::vector<Mat> target_projectors(const Datum& datum) {
  std::vector<Mat> out;
  for (Index j = 0; j < datum.m(); ++j) out.push_back(target_subspace(datum, j).projector());
  return out;
}

void require_geometric(const Datum& datum) {
  require_valid(datum);
  const GeometricCheck geo = is_geometric(datum, 1e-6);
  if (!geo.geometric) {
    std::ostringstream msg;
    msg << "datum is not geometric (max residual " << geo.max_residual() << ")";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

Subspace sign_pattern_intersection(const Datum& datum, const std::vector<Mat>& projectors, Index i,
                                   std::uint64_t pattern) {
  const Index ni = datum.n[static_cast<std::size_t>(i)];
  const Index off = datum.offset(i);
  // x in E_i lies in E^j iff x^T (I - P_j) x = 0 and in E^j-perp iff x^T P_j x = 0.
  Mat gram = Mat::Zero(ni, ni);
  for (Index j = 0; j < datum.m(); ++j) {
    const Mat pjj = projectors[static_cast<std::size_t>(j)].block(off, off, ni, ni);
    if ((pattern >> j) & 1U)
      gram += Mat::Identity(ni, ni) - pjj;
    else
      gram += pjj;
  }
  const EigenPairs eig = eig_sym(SymMat(gram));
  Index null = 0;
  while (null < ni && eig.values(null) <= kNullEigenvalue) ++null;
  if (null == 0) return Subspace(datum.total_dim());
  Mat basis = Mat::Zero(datum.total_dim(), null);
  basis.middleRows(off, ni) = eig.vectors.leftCols(null);
  return Subspace::from_orthonormal(std::move(basis));
}

std::vector<IndependentSubspace> independent_subspaces(const Datum& datum) {
  require_geometric(datum);
  if (datum.m() > kMaxSignMaps) throw std::invalid_argument("independent_subspaces: more than 20 maps");
  const std::vector<Mat> projectors = target_projectors(datum);
  const std::uint64_t patterns = std::uint64_t{1} << datum.m();
  const std::int64_t total = static_cast<std::int64_t>(patterns) * datum.k();

  std::vector<IndependentSubspace> found;
#pragma omp parallel
  {
    std::vector<IndependentSubspace> local;
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t idx = 0; idx < total; ++idx) {
      const Index i = static_cast<Index>(static_cast<std::uint64_t>(idx) / patterns);
      const std::uint64_t pattern = static_cast<std::uint64_t>(idx) % patterns;
      Subspace s = sign_pattern_intersection(datum, projectors, i, pattern);
      if (s.is_zero()) continue;
      IndependentSubspace ind;
      ind.i = i;
      for (Index j = 0; j < datum.m(); ++j) ind.signs.push_back(((pattern >> j) & 1U) != 0);
      ind.space = std::move(s);
      local.push_back(std::move(ind));
    }
#pragma omp critical
    for (auto& item : local) found.push_back(std::move(item));
  }
  // Coordinate first, then signs lexicographically with E^j-perp before E^j.
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return std::tie(a.i, a.signs) < std::tie(b.i, b.signs);
  });

  std::vector<IndependentSubspace> out;
  for (auto& ind : found) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const IndependentSubspace& o) {
      return o.i == ind.i && same_subspace(o.space, ind.space);
    });
    if (!dup) out.push_back(std::move(ind));
  }
  return out;
}

DependentSubspace dependent_subspace(const Datum& datum, const std::vector<IndependentSubspace>& independents) {
  const Index total = datum.total_dim();
  DependentSubspace out;
  std::vector<Subspace> all_k0;
  for (Index i = 0; i < datum.k(); ++i) {
    std::vector<Subspace> mine;
    for (const auto& ind : independents)
      if (ind.i == i) mine.push_back(ind.space);
    for (std::size_t a = 0; a < mine.size(); ++a)
      for (std::size_t b = a + 1; b < mine.size(); ++b)
        if (!mine[a].orthogonal_to(mine[b]))
          throw DecompositionError("independent subspaces of coordinate " + std::to_string(i) + " overlap");
    const Subspace src = source_subspace(datum, i);
    Subspace k0 = src;
    if (!mine.empty()) {
      const Subspace sum = direct_sum(mine);
      if (!src.contains(sum))
        throw DecompositionError("independent subspace outside its coordinate " + std::to_string(i));
      k0 = intersect(src, complement(sum));
    }
    if (k0.ambient() != total) k0 = Subspace(total);
    all_k0.push_back(k0);
    out.k0.push_back(std::move(k0));
  }
  out.k_dep = direct_sum(all_k0);
  return out;
}

std::vector<CriticalPart> critical_decomposition(const Datum& datum, const Subspace& k_dep, const SymMat& sigma,
                                                 const DecompositionSettings& settings) {
  const Index total = datum.total_dim();
  if (sigma.dim() != total || k_dep.ambient() != total)
    throw std::invalid_argument("critical_decomposition: sigma and K_dep must be N x N");
  if (k_dep.is_zero()) return {};
  const Mat& v = k_dep.basis();
  const EigenPairs eig = eig_sym(SymMat(v.transpose() * sigma.matrix() * v));
  const Index r = eig.values.size();
  const double scale = std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
  if (eig.values(0) < -1e-9 * scale) throw DecompositionError("sigma is not positive semidefinite on K_dep");

  std::vector<std::pair<Index, Index>> groups;  // [begin, end)
  Index begin = 0;
  for (Index t = 1; t <= r; ++t) {
    if (t == r || eig.values(t) - eig.values(t - 1) > settings.group_tol * scale) {
      groups.emplace_back(begin, t);
      begin = t;
    }
  }

  std::vector<CriticalPart> parts;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto [lo, hi] = groups[g];
    CriticalPart part;
    part.space = orthonormalize(v * eig.vectors.middleCols(lo, hi - lo));
    part.variance = std::max(0.0, eig.values.segment(lo, hi - lo).mean());
    const Mat p = part.space.projector();
    for (Index i = 0; i < datum.k(); ++i) {
      const Mat pi = source_subspace(datum, i).projector();
      const double comm = (p * pi - pi * p).norm();
      if (comm > settings.commute_tol)
        throw DecompositionError("eigenspace " + std::to_string(g) + " of sigma is not product-form (commutator " +
                                 std::to_string(comm) + " with coordinate " + std::to_string(i) + ")");
      const Index ni = datum.n[static_cast<std::size_t>(i)];
      part.product.parts.push_back(
          orthonormalize(part.space.basis().middleRows(datum.offset(i), ni), std::nullopt, 1.0));
    }
    part.check = criticality_check(datum, part.product);
    if (part.check.kind != Criticality::critical) {
      std::ostringstream msg;
      msg << "eigenspace " << g << " of sigma (variance " << part.variance << ") is " << to_string(part.check.kind)
          << ": lhs " << part.check.lhs << " vs rhs " << part.check.rhs;
      throw DecompositionError(msg.str());
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

const char* to_string(FactorClass::Kind kind) {
  return kind == FactorClass::Kind::arbitrary ? "arbitrary" : "gaussian";
}

StructureReport extremizer_report(const Datum& datum, const std::optional<SymMat>& sigma,
                                  const DecompositionSettings& settings) {
  StructureReport report;
  report.independents = independent_subspaces(datum);
  report.dependent = dependent_subspace(datum, report.independents);
  const Index total = datum.total_dim();

  for (Index i = 0; i < datum.k(); ++i) {
    std::vector<Subspace> row{report.dependent.k0[static_cast<std::size_t>(i)]};
    Mat psum = row.front().projector();
    for (const auto& ind : report.independents)
      if (ind.i == i) {
        row.push_back(ind.space);
        psum += ind.space.projector();
      }
    if ((psum - source_subspace(datum, i).projector()).norm() > 1e-8)
      throw DecompositionError("coordinate " + std::to_string(i) + " does not decompose into K_0 and independents");
    report.per_coordinate.push_back(std::move(row));
  }

  const SymMat cov = sigma ? *sigma : SymMat::identity(total);
  report.critical_parts = critical_decomposition(datum, report.dependent.k_dep, cov, settings);

  for (const auto& ind : report.independents) {
    FactorClass f;
    f.kind = FactorClass::Kind::arbitrary;
    f.i = ind.i;
    f.space = ind.space;
    f.text = "arbitrary distribution on an independent subspace of E_" + std::to_string(ind.i + 1) + " (dim " +
             std::to_string(ind.space.dim()) + ")";
    report.factors.push_back(std::move(f));
  }
  for (Index i = 0; i < datum.k(); ++i) {
    const Subspace src = source_subspace(datum, i);
    for (std::size_t l = 0; l < report.critical_parts.size(); ++l) {
      Subspace piece = intersect(src, report.critical_parts[l].space);
      if (piece.is_zero()) continue;
      std::ostringstream text;
      text << "isotropic Gaussian on K_dep within E_" << (i + 1) << " (dim " << piece.dim() << "), variance "
           << report.critical_parts[l].variance << " linked within critical part " << l;
      FactorClass f;
      f.kind = FactorClass::Kind::gaussian;
      f.i = i;
      f.space = std::move(piece);
      f.part = l;
      f.text = text.str();
      report.factors.push_back(std::move(f));
    }
  }
  return report;
}

TargetDecompositionCheck verify_target_decomposition(const Datum& datum, const StructureReport& report, double tol) {
  TargetDecompositionCheck out;
  out.ok = true;
  const Mat& kdep = report.dependent.k_dep.basis();
  for (Index j = 0; j < datum.m(); ++j) {
    const Mat pj = target_subspace(datum, j).projector();
    const Mat dep_proj =
        kdep.cols() > 0 ? orthonormalize(pj * kdep, std::nullopt, 1.0).projector() : Mat::Zero(pj.rows(), pj.cols());
    Mat sum = dep_proj;
    for (const auto& ind : report.independents)
      if (ind.signs[static_cast<std::size_t>(j)]) sum += ind.space.projector();
    out.target_residuals.push_back((pj - sum).norm());

    Mat parts = Mat::Zero(pj.rows(), pj.cols());
    for (const auto& part : report.critical_parts)
      parts += orthonormalize(pj * part.space.basis(), std::nullopt, 1.0).projector();
    out.part_residuals.push_back((dep_proj - parts).norm());
    if (out.target_residuals.back() > tol || out.part_residuals.back() > tol) out.ok = false;
  }
  return out;
}

}  // namespace entineq
