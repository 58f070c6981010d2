#include "entineq/catalog.hpp"
#include "entineq/entropy.hpp"
#include "entineq/extremal.hpp"
#include "entineq/follmer.hpp"
#include "entineq/lemma.hpp"
#include "support.hpp"

#include <cmath>

using namespace entineq;
using entineq::testing::mat;

namespace {

GaussianMixture scalar_gaussian(double var, double mean = 0.0) {
  Vec mu(1);
  mu << mean;
  return GaussianMixture::gaussian(mu, PdMat(mat(1, 1, {var})));
}

GaussianMixture two_bumps(double separation) {
  std::vector<Component> comps;
  for (double m : {-separation / 2, separation / 2}) {
    Vec mu(1);
    mu << m;
    comps.push_back({0.5, mu, PdMat(mat(1, 1, {1.0}))});
  }
  return GaussianMixture(comps);
}

McSettings mc(std::uint64_t seed, std::size_t samples = 200000) {
  McSettings s;
  s.samples = samples;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Entropy, GaussianOracles) {
  EXPECT_NEAR(entropy_gaussian(PdMat::identity(1)), 1.4189385, 1e-7);
  EXPECT_NEAR(entropy_gaussian(PdMat::identity(2)), 2.8378771, 1e-7);
  EXPECT_NEAR(entropy_gaussian(PdMat(mat(2, 2, {1, 0, 0, 4}))), 3.5310242, 1e-7);
}

TEST(Entropy, MonteCarloMatchesGaussian) {
  const GaussianMixture g = GaussianMixture::gaussian(Vec::Zero(2), PdMat(mat(2, 2, {2, 0.5, 0.5, 1})));
  const McEstimate e = entropy_mixture_mc(g, mc(1));
  EXPECT_NEAR(e.value, entropy_gaussian(g.components()[0].cov), 4 * e.se + 1e-3);
  EXPECT_GT(e.se, 0.0);
}

TEST(Entropy, FarSeparatedMixture) {
  const McEstimate e = entropy_mixture_mc(two_bumps(60.0), mc(2));
  EXPECT_NEAR(e.value, 2.1120857, 4 * e.se + 1e-3);
}

TEST(Entropy, DeterministicGivenSeed) {
  const McEstimate a = entropy_mixture_mc(two_bumps(2.0), mc(5, 20000));
  const McEstimate b = entropy_mixture_mc(two_bumps(2.0), mc(5, 20000));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.se, b.se);
}

TEST(Mixture, RejectsBadWeights) {
  std::vector<Component> comps{{0.5, Vec::Zero(1), PdMat::identity(1)}, {0.4, Vec::Zero(1), PdMat::identity(1)}};
  EXPECT_THROW(GaussianMixture{comps}, std::invalid_argument);
}

TEST(Mixture, MomentsOfTwoBumps) {
  const GaussianMixture m = two_bumps(2.0);
  EXPECT_NEAR(m.mean()(0), 0.0, 1e-15);
  EXPECT_NEAR(m.covariance()(0, 0), 2.0, 1e-12);
}

TEST(Pushforward, ShannonStamImageOfGaussians) {
  const Datum d = catalog::shannon_stam(0.5);
  ProductDistribution x{{scalar_gaussian(2.0, 1.0), scalar_gaussian(1.0, -1.0)}};
  const GaussianMixture y = pushforward(d, x, 0);
  ASSERT_TRUE(y.is_gaussian());
  EXPECT_NEAR(y.components()[0].cov.matrix()(0, 0), 1.5, 1e-12);
  EXPECT_NEAR(y.components()[0].mean(0), 0.0, 1e-12);
}

TEST(Pushforward, EnumeratesComponentTuples) {
  const Datum d = catalog::shannon_stam(0.5);
  ProductDistribution x{{two_bumps(4.0), two_bumps(6.0)}};
  EXPECT_EQ(pushforward(d, x, 0).size(), 4u);
  EXPECT_EQ(x.component_count(), 4u);
}

TEST(Pushforward, ComponentCap) {
  std::vector<Component> comps;
  for (int c = 0; c < 400; ++c) comps.push_back({1.0 / 400, Vec::Constant(1, c), PdMat::identity(1)});
  const GaussianMixture big(comps);
  const Datum d = catalog::shannon_stam(0.5);
  ProductDistribution x{{big, big}};
  EXPECT_THROW(pushforward(d, x, 0), ComponentCapExceeded);
}

TEST(Deficit, PerturbedShannonStamOracle) {
  const Datum d = catalog::shannon_stam(0.5);
  ProductDistribution x{{scalar_gaussian(2.0), scalar_gaussian(1.0)}};
  const DeficitEstimate e = entropy_deficit(d, x, 0.0, mc(1));
  EXPECT_TRUE(e.exact);
  EXPECT_NEAR(e.value, 0.5 * std::log(1.5) - 0.25 * std::log(2.0), 1e-12);
  EXPECT_NEAR(e.value, 0.0294458, 1e-7);
  EXPECT_FALSE(within_noise(e));
}

TEST(Deficit, StandardGaussianIsExtremal) {
  for (const auto& [name, d] : catalog::geometric_corpus()) {
    const DeficitEstimate e = entropy_deficit(d, ProductDistribution::gaussian(BlockPd::identity(d)), 0.0, mc(1));
    EXPECT_TRUE(within_noise(e)) << name << " " << e.value;
  }
}

TEST(Deficit, MixtureOnIndependentSubspaceIsExtremal) {
  const Datum d = catalog::toy(0.5);
  // X_1 = (X, Y) with X a mixture and Y standard normal, X_2 = Z standard normal.
  std::vector<Component> comps;
  for (double m : {-3.0, 2.0}) {
    Vec mu(2);
    mu << m, 0.0;
    comps.push_back({0.5, mu, PdMat::identity(2)});
  }
  ProductDistribution x{{GaussianMixture(comps), scalar_gaussian(1.0)}};
  const DeficitEstimate e = entropy_deficit(d, x, 0.0, mc(3));
  EXPECT_FALSE(e.exact);
  EXPECT_TRUE(within_noise(e)) << e.value << " +- " << e.se;
}

TEST(Deficit, MixtureOnDependentSubspaceIsStrict) {
  const Datum d = catalog::shannon_stam(0.5);
  ProductDistribution x{{two_bumps(4.0), scalar_gaussian(1.0)}};
  const DeficitEstimate e = entropy_deficit(d, x, 0.0, mc(4));
  EXPECT_GT(e.value, 5 * e.se);
}

TEST(Deficit, SerialAndParallelAgreeAcrossSeeds) {
  const Datum d = catalog::shannon_stam(0.5);
  ProductDistribution x{{two_bumps(3.0), scalar_gaussian(1.0)}};
  const DeficitEstimate a = entropy_deficit(d, x, 0.0, mc(9, 20000));
  const DeficitEstimate b = entropy_deficit(d, x, 0.0, mc(9, 20000));
  EXPECT_EQ(a.value, b.value);
}

TEST(Closure, ExtremalGaussiansPass) {
  const Datum d = catalog::shannon_stam(0.5);
  const ProductDistribution a{{scalar_gaussian(1.0), scalar_gaussian(1.0)}};
  const ProductDistribution b{{scalar_gaussian(3.0, 1.0), scalar_gaussian(3.0, -2.0)}};
  const ClosureReport r = convolution_closure_test(d, a, b, 0.0, mc(1));
  EXPECT_EQ(r.status, ClosureReport::Status::passed);
}

TEST(Closure, IndependentMixturesPass) {
  const Datum d = catalog::toy(0.5);
  std::vector<Component> comps;
  for (double m : {-2.0, 2.0}) {
    Vec mu(2);
    mu << m, 0.0;
    comps.push_back({0.5, mu, PdMat::identity(2)});
  }
  const ProductDistribution a{{GaussianMixture(comps), scalar_gaussian(1.0)}};
  const ClosureReport r = convolution_closure_test(d, a, a, 0.0, mc(2));
  EXPECT_EQ(r.status, ClosureReport::Status::passed) << r.sum.value << " +- " << r.sum.se;
}

TEST(Closure, NonExtremalInputIsPreconditionUnmet) {
  const Datum d = catalog::shannon_stam(0.5);
  const ProductDistribution a{{scalar_gaussian(2.0), scalar_gaussian(1.0)}};
  EXPECT_EQ(convolution_closure_test(d, a, a, 0.0, mc(1)).status, ClosureReport::Status::precondition_unmet);
}

TEST(Lemma, IdentityGivesZeroGap) {
  const Datum d = catalog::toy(0.5);
  const LemmaResult r = lemma_matrix_inequality_test(d, PinnedBlockPsd::from_matrix(d, Mat::Identity(3, 3)));
  EXPECT_NEAR(r.gap, 0.0, 1e-14);
  EXPECT_TRUE(r.equality);
  EXPECT_TRUE(r.iff_consistent);
}

TEST(Lemma, ShannonStamDiagonalExample) {
  // A = diag(a, b): lhs = (a-1)^2/2 + (b-1)^2/2, rhs = (sqrt((a^2+b^2)/2) - 1)^2.
  const Datum d = catalog::shannon_stam(0.5);
  const LemmaResult r = lemma_matrix_inequality_test(d, PinnedBlockPsd::from_matrix(d, mat(2, 2, {2, 0, 0, 0.5})));
  const double rhs = std::pow(std::sqrt((4.0 + 0.25) / 2) - 1, 2);
  EXPECT_NEAR(r.lhs, 0.625, 1e-14);
  EXPECT_NEAR(r.rhs, rhs, 1e-12);
  EXPECT_FALSE(r.equality);
  EXPECT_TRUE(r.iff_consistent);
}

TEST(Lemma, GeneralPinnedMatrixCanViolate) {
  const Datum d = catalog::shannon_stam(0.5);
  const LemmaResult r = lemma_matrix_inequality_test(d, PinnedBlockPsd::from_matrix(d, mat(2, 2, {1, 0.5, 0.5, 1})));
  EXPECT_NEAR(r.lhs, 0.0, 1e-15);
  EXPECT_NEAR(r.rhs, 0.25, 1e-12);
  EXPECT_GT(pinned_violations(d, 200, 1), 0u);
}

TEST(Lemma, PinnedSamplerKeepsBlocks) {
  Rng rng(4);
  const Datum d = catalog::toy(0.5);
  const PinnedBlockPsd base = random_block_diagonal_psd(d, rng);
  const PinnedBlockPsd p = random_pinned_psd(d, base.blocks, rng);
  for (std::size_t i = 0; i < base.blocks.size(); ++i) EXPECT_LE((p.blocks[i] - base.blocks[i]).norm(), 1e-12);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat>(p.a).eigenvalues().minCoeff(), -1e-10);
}

TEST(Lemma, BatteryOnCorpus) {
  for (const auto& [name, d] : catalog::geometric_corpus()) {
    const LemmaBattery b = lemma_battery(d, 300, 11);
    EXPECT_EQ(b.violations, 0u) << name;
    EXPECT_EQ(b.commuting_equal, b.commuting_draws) << name;
    EXPECT_EQ(b.iff_inconsistent, 0u) << name;
    if (b.generic_applicable) EXPECT_GE(b.generic_strict, b.generic_draws * 99 / 100) << name;
  }
}

TEST(Follmer, ScalarOracle) {
  const FollmerResult r = follmer_energy_gaussian(PdMat(mat(1, 1, {2.0})));
  EXPECT_NEAR(r.energy, 0.1534264, 1e-7);
  EXPECT_NEAR(r.relative_entropy, 0.1534264, 1e-7);
  EXPECT_LE(std::abs(r.difference), 1e-8);
}

TEST(Follmer, DiagonalOracle) {
  const FollmerResult r = follmer_energy_gaussian(PdMat(mat(2, 2, {2.0, 0.0, 0.0, 0.5})));
  EXPECT_NEAR(r.energy, 0.25, 1e-9);
}

TEST(Follmer, IdentityHasZeroEnergy) {
  EXPECT_NEAR(follmer_energy_gaussian(PdMat::identity(3)).energy, 0.0, 1e-15);
  EXPECT_NEAR(follmer_integrand(PdMat::identity(3), 0.4), 0.0, 1e-15);
}

TEST(Follmer, RandomCovariancesAllRules) {
  Rng rng(17);
  for (std::size_t points : {15u, 21u, 31u, 41u, 51u, 61u}) {
    const PdMat s(random_spd(3, 50.0, rng));
    const FollmerResult r = follmer_energy_gaussian(s, points);
    EXPECT_LE(std::abs(r.difference), 1e-8) << points;
  }
}

TEST(Follmer, RejectsUnknownRule) {
  EXPECT_THROW(follmer_energy_gaussian(PdMat::identity(1), 17), std::invalid_argument);
}

TEST(Extremal, ToyWithIndependentMixture) {
  const Datum d = catalog::toy(0.5);
  const StructureReport report = extremizer_report(d);
  std::vector<Component> comps;
  for (double m : {-3.0, 2.0}) {
    Vec mu(2);
    mu << m, 0.5;
    comps.push_back({0.5, mu, PdMat::identity(2)});
  }
  const ProductDistribution x{{GaussianMixture(comps), scalar_gaussian(1.0)}};
  const ExtremalCheck c = check_extremal_distribution(d, x, report, mc(1));
  EXPECT_TRUE(c.independence_ok);
  EXPECT_TRUE(c.gaussian_dep_ok) << c.dep_reason;
  EXPECT_TRUE(c.verdict);
  EXPECT_TRUE(c.cross_validated);
}

TEST(Extremal, ToyWithMixtureOnDependentDirection) {
  const Datum d = catalog::toy(0.5);
  const StructureReport report = extremizer_report(d);
  std::vector<Component> comps;
  for (double m : {-3.0, 2.0}) {
    Vec mu(2);
    mu << 0.0, m;
    comps.push_back({0.5, mu, PdMat::identity(2)});
  }
  const ProductDistribution x{{GaussianMixture(comps), scalar_gaussian(1.0)}};
  const ExtremalCheck c = check_extremal_distribution(d, x, report, mc(2));
  EXPECT_FALSE(c.gaussian_dep_ok);
  EXPECT_FALSE(c.verdict);
  EXPECT_TRUE(c.cross_validated);
}

TEST(Extremal, ShannonStamUnequalVariances) {
  const Datum d = catalog::shannon_stam(0.5);
  const StructureReport report = extremizer_report(d);
  const ProductDistribution x{{scalar_gaussian(2.0), scalar_gaussian(1.0)}};
  const ExtremalCheck c = check_extremal_distribution(d, x, report, mc(3));
  EXPECT_FALSE(c.verdict);
  EXPECT_TRUE(c.cross_validated);
}
