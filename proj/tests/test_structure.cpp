#include "entineq/catalog.hpp"
#include "entineq/structure.hpp"
#include "support.hpp"

#include <cmath>

using namespace entineq;
using entineq::testing::mat;
using entineq::testing::span;

namespace {

Subspace axis(Index ambient, Index at) {
  Mat v = Mat::Zero(ambient, 1);
  v(at, 0) = 1.0;
  return Subspace::from_orthonormal(v);
}

void expect_dichotomy(const Datum& d, const StructureReport& r) {
  const Index total = d.total_dim();
  // Pieces are mutually orthogonal and tile each E_i.
  for (std::size_t a = 0; a < r.independents.size(); ++a) {
    EXPECT_TRUE(r.independents[a].space.orthogonal_to(r.dependent.k_dep));
    for (std::size_t b = a + 1; b < r.independents.size(); ++b)
      EXPECT_TRUE(r.independents[a].space.orthogonal_to(r.independents[b].space));
  }
  for (Index i = 0; i < d.k(); ++i) {
    Mat sum = Mat::Zero(total, total);
    for (const auto& s : r.per_coordinate[static_cast<std::size_t>(i)]) sum += s.projector();
    EXPECT_LE((sum - source_subspace(d, i).projector()).norm(), 1e-8);
  }
  // Each independent subspace lies in E^j or its complement, as its signs say.
  for (const auto& ind : r.independents)
    for (Index j = 0; j < d.m(); ++j) {
      const Subspace t = target_subspace(d, j);
      if (ind.signs[static_cast<std::size_t>(j)])
        EXPECT_TRUE(t.contains(ind.space));
      else
        EXPECT_TRUE(t.orthogonal_to(ind.space));
    }
  EXPECT_TRUE(verify_target_decomposition(d, r).ok);
}

}  // namespace

TEST(Structure, IdentityIsAllIndependent) {
  const Datum d = catalog::identity(3);
  const StructureReport r = extremizer_report(d);
  ASSERT_EQ(r.independents.size(), 1u);
  EXPECT_EQ(r.independents[0].space.dim(), 3);
  EXPECT_TRUE(r.independents[0].signs[0]);
  EXPECT_TRUE(r.dependent.k_dep.is_zero());
  EXPECT_TRUE(r.critical_parts.empty());
  expect_dichotomy(d, r);
}

TEST(Structure, ShannonStamIsGaussianOnly) {
  for (double lambda : {0.25, 0.5}) {
    const Datum d = catalog::shannon_stam(lambda);
    const StructureReport r = extremizer_report(d);
    EXPECT_TRUE(r.gaussian_only());
    EXPECT_EQ(r.dependent.k_dep.dim(), 2);
    ASSERT_EQ(r.critical_parts.size(), 1u);
    EXPECT_EQ(r.critical_parts[0].check.kind, Criticality::critical);
    EXPECT_NEAR(r.critical_parts[0].variance, 1.0, 1e-12);
    expect_dichotomy(d, r);
  }
}

TEST(Structure, ToyDatumSplitsFirstCoordinate) {
  const Datum d = catalog::toy(0.5);
  const StructureReport r = extremizer_report(d);
  ASSERT_EQ(r.independents.size(), 1u);
  const IndependentSubspace& ind = r.independents[0];
  EXPECT_EQ(ind.i, 0);
  EXPECT_TRUE(same_subspace(ind.space, axis(3, 0)));
  EXPECT_TRUE(ind.signs[0]);
  EXPECT_FALSE(ind.signs[1]);
  EXPECT_TRUE(same_subspace(r.dependent.k0[0], axis(3, 1)));
  EXPECT_TRUE(same_subspace(r.dependent.k0[1], axis(3, 2)));
  EXPECT_EQ(r.dependent.k_dep.dim(), 2);
  std::size_t arbitrary = 0, gaussian = 0;
  for (const auto& f : r.factors) (f.kind == FactorClass::Kind::arbitrary ? arbitrary : gaussian)++;
  EXPECT_EQ(arbitrary, 1u);
  EXPECT_EQ(gaussian, 2u);
  expect_dichotomy(d, r);
}

TEST(Structure, ZamirFederExample) {
  const Datum d = catalog::zamir_feder_example();
  const StructureReport r = extremizer_report(d);
  ASSERT_EQ(r.independents.size(), 1u);
  EXPECT_EQ(r.independents[0].i, 0);
  EXPECT_TRUE(r.independents[0].signs[0]);
  EXPECT_TRUE(same_subspace(r.dependent.k_dep, span(mat(3, 2, {0, 0, 1, 0, 0, 1}))));
  expect_dichotomy(d, r);
}

TEST(Structure, DichotomyOnRandomGeometricData) {
  Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const Datum d = catalog::random_geometric(rng);
    const StructureReport r = extremizer_report(d);
    expect_dichotomy(d, r);
  }
}

TEST(Structure, BasisInvariantUnderOrthogonalChange) {
  Rng rng(55);
  const Datum d = catalog::toy(0.5);
  std::vector<Mat> a, c;
  for (Index pj : d.p) a.push_back(random_orthogonal(pj, rng));
  for (Index ni : d.n) c.push_back(random_orthogonal(ni, rng));
  const Datum t = apply_equivalence(d, a, c);
  ASSERT_TRUE(is_geometric(t).geometric);
  const StructureReport r0 = extremizer_report(d);
  const StructureReport r1 = extremizer_report(t);
  Mat big = Mat::Zero(3, 3);
  big.topLeftCorner(2, 2) = c[0];
  big.bottomRightCorner(1, 1) = c[1];
  ASSERT_EQ(r0.independents.size(), r1.independents.size());
  EXPECT_TRUE(same_subspace(orthonormalize(big * r0.independents[0].space.basis()), r1.independents[0].space));
  EXPECT_TRUE(same_subspace(orthonormalize(big * r0.dependent.k_dep.basis()), r1.dependent.k_dep));
}

TEST(Structure, RequiresGeometricDatum) {
  Datum d = catalog::shannon_stam(0.5);
  d.B[0] = mat(1, 2, {1, 1});
  EXPECT_THROW(independent_subspaces(d), PreconditionError);
}

TEST(Structure, PatternIntersectionMatchesAxes) {
  const Datum d = catalog::toy(0.5);
  std::vector<Mat> proj;
  for (Index j = 0; j < d.m(); ++j) proj.push_back(target_subspace(d, j).projector());
  // Bit j set means E^j.
  EXPECT_TRUE(same_subspace(sign_pattern_intersection(d, proj, 0, 0b01), axis(3, 0)));
  EXPECT_TRUE(sign_pattern_intersection(d, proj, 0, 0b11).is_zero());
  EXPECT_TRUE(sign_pattern_intersection(d, proj, 1, 0b00).is_zero());
}

TEST(Sigma, ScaledIdentityGivesOnePart) {
  const Datum d = catalog::shannon_stam(0.5);
  const StructureReport r = extremizer_report(d, SymMat(Mat(2.0 * Mat::Identity(2, 2))));
  ASSERT_EQ(r.critical_parts.size(), 1u);
  EXPECT_NEAR(r.critical_parts[0].variance, 2.0, 1e-12);
}

TEST(Sigma, UnequalVariancesAcrossALinkAreRejected) {
  const Datum d = catalog::shannon_stam(0.5);
  EXPECT_THROW(extremizer_report(d, SymMat(mat(2, 2, {1, 0, 0, 2}))), DecompositionError);
}

TEST(Sigma, NonProductFormRejected) {
  const Datum d = catalog::shannon_stam(0.5, 2);
  Mat s = Mat::Identity(4, 4);
  s(0, 1) = s(1, 0) = 0.3;
  s(2, 3) = s(3, 2) = -0.3;
  EXPECT_THROW(extremizer_report(d, SymMat(s)), DecompositionError);
}

TEST(Sigma, ShannonStamTwoDimensionalSplitsIntoTwoParts) {
  const Datum d = catalog::shannon_stam(0.5, 2);
  Vec v(4);
  v << 1, 2, 1, 2;
  const StructureReport r = extremizer_report(d, SymMat(Mat(v.asDiagonal())));
  ASSERT_EQ(r.critical_parts.size(), 2u);
  EXPECT_NEAR(r.critical_parts[0].variance, 1.0, 1e-12);
  EXPECT_NEAR(r.critical_parts[1].variance, 2.0, 1e-12);
  EXPECT_TRUE(same_subspace(r.critical_parts[0].space, span(mat(4, 2, {1, 0, 0, 0, 0, 1, 0, 0}))));
  for (const auto& p : r.critical_parts) EXPECT_EQ(p.check.kind, Criticality::critical);
  EXPECT_TRUE(verify_target_decomposition(d, r).ok);
}

TEST(Sigma, RotatedWithinCriticalDirectionsAccepted) {
  const Datum d = catalog::shannon_stam(0.5, 2);
  Rng rng(3);
  const Mat q = random_orthogonal(2, rng);
  Mat s = Mat::Zero(4, 4);
  const Mat block = q * Vec(Eigen::Vector2d(1.0, 3.0)).asDiagonal() * q.transpose();
  s.topLeftCorner(2, 2) = block;
  s.bottomRightCorner(2, 2) = block;
  const StructureReport r = extremizer_report(d, SymMat(s));
  EXPECT_EQ(r.critical_parts.size(), 2u);
}
