// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "entineq/catalog.hpp"
#include "entineq/entropy.hpp"
#include "entineq/follmer.hpp"
#include "entineq/gaussopt.hpp"
#include "entineq/lemma.hpp"
#include "entineq/structure.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace entineq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Mat diag(std::initializer_list<double> v) {
  Vec d(static_cast<Index>(v.size()));
  Index at = 0;
  for (double x : v) d(at++) = x;
  return d.asDiagonal();
}

GaussianMixture scalar_gaussian(double var) { return GaussianMixture::gaussian(Vec::Zero(1), PdMat(diag({var}))); }

McSettings mc(std::uint64_t seed) {
  McSettings s;
  s.samples = 200000;
  s.seed = seed;
  return s;
}

/// X_1 = (X, Y) with X a bimodal mixture independent of Y ~ N(0, 1).
GaussianMixture toy_first_factor(double left, double right) {
  std::vector<Component> comps;
  for (double m : {left, right}) {
    Vec mu(2);
    mu << m, 0.0;
    comps.push_back({0.5, mu, PdMat::identity(2)});
  }
  return GaussianMixture(comps);
}

Verdict criterion1() {
  Verdict v;
  double worst_value = 0.0, worst_k = 0.0, worst_time = 0.0;
  for (const auto& [name, d] : catalog::geometric_corpus()) {
    const auto t0 = Clock::now();
    ConstantSettings settings;
    settings.seed = 1;
    const BestConstant bc = best_constant(d, settings);
    const double elapsed = seconds_since(t0);
    worst_time = std::max(worst_time, elapsed);
    v.require(bc.kind == BestConstant::Kind::finite, name + " finite");
    if (bc.kind != BestConstant::Kind::finite || !bc.certificate) continue;
    worst_value = std::max(worst_value, std::abs(bc.value));
    const Mat k = bc.certificate->assemble();
    worst_k = std::max(worst_k, (k - Mat::Identity(k.rows(), k.cols())).norm());
    v.require(std::abs(bc.value) <= 1e-9, name + " C_g = 0");
    v.require((k - Mat::Identity(k.rows(), k.cols())).norm() <= 1e-9, name + " K* = I");
    v.require(elapsed < 1.0, name + " runtime");
  }
  v.detail << "corpus=" << catalog::geometric_corpus().size() << " max|C_g|=" << worst_value
           << " max||K*-I||=" << worst_k << " max_time=" << worst_time << "s";
  return v;
}

Verdict criterion2() {
  Verdict v;
  std::size_t converged = 0, geometric = 0, transported = 0;
  double worst_residual = 0.0, worst_geo = 0.0, worst_transport = 0.0;
  for (std::uint64_t idx = 0; idx < 50; ++idx) {
    Rng rng = make_rng(2, Stream::corpus, idx);
    const Datum base = catalog::random_geometric(rng);
    const catalog::Equivalence e = catalog::random_equivalence(base, rng);
    const Datum d = apply_equivalence(base, e.a, e.c);
    const SolveResult s = fixed_point_solve(d);
    if (s.status == SolveStatus::converged && s.residual <= 1e-8) ++converged;
    worst_residual = std::max(worst_residual, s.residual);
    if (s.status != SolveStatus::converged) continue;
    const Geometrization g = geometrize(d, s.k);
    const double geo = is_geometric(g.datum, 1e-6).max_residual();
    worst_geo = std::max(worst_geo, geo);
    if (geo <= 1e-6) ++geometric;
    // The standard Gaussian extremizes the base datum; C_i C_i^T must solve the transformed one.
    std::vector<PdMat> moved;
    for (const auto& c : e.c) moved.emplace_back(Mat(c * c.transpose()));
    const double defect = normalized_defect(d, BlockPd(moved));
    worst_transport = std::max(worst_transport, defect);
    if (defect <= 1e-6) ++transported;
  }
  v.require(converged == 50, "solver convergence");
  v.require(geometric == 50, "geometrize");
  v.require(transported == 50, "transport");
  v.detail << "converged=" << converged << "/50 geometric=" << geometric << "/50 transported=" << transported
           << "/50 max_residual=" << worst_residual << " max_geo_residual=" << worst_geo
           << " max_transport_defect=" << worst_transport;
  return v;
}

Verdict criterion3() {
  Verdict v;
  const Datum d = catalog::shannon_stam(0.5, 2);
  const StructureReport plain = extremizer_report(d);
  v.require(plain.independents.empty(), "no independent subspaces");
  v.require(plain.dependent.k_dep.dim() == 4, "K_dep = E_0");

  const StructureReport split = extremizer_report(d, SymMat(diag({1, 4, 1, 4})));
  bool shapes = split.critical_parts.size() == 2;
  if (shapes)
    for (std::size_t l = 0; l < 2; ++l) {
      const CriticalPart& part = split.critical_parts[l];
      Mat expect = Mat::Zero(4, 2);
      expect(static_cast<Index>(l), 0) = 1.0;
      expect(static_cast<Index>(l) + 2, 1) = 1.0;
      shapes = shapes && same_subspace(part.space, Subspace::from_orthonormal(expect)) &&
               part.product.parts.size() == 2 && part.product.parts[0].dim() == 1 &&
               part.product.parts[1].dim() == 1 && part.check.kind == Criticality::critical;
    }
  v.require(shapes, "two parts span{e_l} + span{e_l}");

  bool rejected = false;
  std::string reason;
  try {
    extremizer_report(d, SymMat(diag({1, 2, 2, 1})));
  } catch (const DecompositionError& e) {
    rejected = true;
    reason = e.what();
  }
  v.require(rejected, "mismatched marginals rejected");
  v.detail << "independents=" << plain.independents.size() << " dim K_dep=" << plain.dependent.k_dep.dim()
           << " parts(diag(1,4,1,4))=" << split.critical_parts.size() << " diag(1,2,2,1): "
           << (rejected ? "rejected (" + reason + ")" : "accepted");
  return v;
}

Verdict criterion4() {
  Verdict v;
  const Datum d = catalog::toy(0.5);
  const StructureReport r = extremizer_report(d);
  Mat ex = Mat::Zero(3, 1);
  ex(0, 0) = 1.0;
  const bool one = r.independents.size() == 1 && same_subspace(r.independents[0].space, Subspace::from_orthonormal(ex));
  v.require(one, "single independent subspace span{e_x}");

  const ProductDistribution extremal{{toy_first_factor(-3.0, 2.0), scalar_gaussian(1.0)}};
  const DeficitEstimate e0 = entropy_deficit(d, extremal, 0.0, mc(4));
  v.require(!e0.exact && std::abs(e0.value) <= 3.0 * e0.se, "extremizer deficit within 3 SE");

  const ProductDistribution perturbed{{toy_first_factor(-3.0, 2.0), scalar_gaussian(2.0)}};
  const DeficitEstimate e1 = entropy_deficit(d, perturbed, 0.0, mc(5));
  v.require(e1.value >= 5.0 * e1.se && e1.value > 0.0, "perturbed deficit >= 5 SE");
  v.detail << "independents=" << r.independents.size() << " extremizer deficit=" << e0.value << " (se " << e0.se
           << ") perturbed deficit=" << e1.value << " (se " << e1.se << ", exact "
           << 0.5 * std::log(1.5) - 0.25 * std::log(2.0) << ")";
  return v;
}

Verdict criterion5() {
  Verdict v;
  // 2 c1 + c2 = 2 + d2 + d3 with d1 = 1; c1 is determined by the rest.
  std::optional<Datum> found;
  SolveResult solve;
  std::ostringstream coeffs;
  for (double c2 : {0.25, 0.5, 0.75, 1.0}) {
    for (double d2 : {0.25, 0.5, 0.75}) {
      for (double d3 : {0.25, 0.5, 0.75}) {
        const double c1 = (2.0 + d2 + d3 - c2) / 2.0;
        const Datum d = catalog::three_map(c1, c2, 1.0, d2, d3);
        solve = fixed_point_solve(d);
        if (solve.status == SolveStatus::converged) {
          found = d;
          coeffs << "c=(" << c1 << "," << c2 << ") d=(1," << d2 << "," << d3 << ")";
          break;
        }
      }
      if (found) break;
    }
    if (found) break;
  }
  v.require(found.has_value(), "extremizable coefficients found");
  if (!found) return v;
  const Geometrization g = geometrize(*found, solve.k);
  const auto independents = independent_subspaces(g.datum);
  const StructureReport r = extremizer_report(g.datum);
  bool all_gaussian = true;
  for (const auto& f : r.factors) all_gaussian = all_gaussian && f.kind == FactorClass::Kind::gaussian;
  v.require(independents.empty(), "no independent subspaces");
  v.require(r.gaussian_only() && all_gaussian, "Gaussian-only report");
  v.detail << coeffs.str() << " iterations=" << solve.iterations << " patterns=" << (1 << g.datum.m()) << "x"
           << g.datum.k() << " independents=" << independents.size()
           << " gaussian_only=" << (r.gaussian_only() ? "yes" : "no");
  return v;
}

Verdict criterion6(std::ostringstream& info) {
  Verdict v;
  std::size_t draws = 0, violations = 0, commuting = 0, commuting_equal = 0, generic = 0, strict = 0, iff_bad = 0;
  double min_gap = INFINITY;
  for (const auto& [name, d] : catalog::geometric_corpus()) {
    const LemmaBattery b = lemma_battery(d, 1000, 6);
    draws += b.draws;
    violations += b.violations;
    min_gap = std::min(min_gap, b.min_gap);
    commuting += b.commuting_draws;
    commuting_equal += b.commuting_equal;
    iff_bad += b.iff_inconsistent;
    v.require(b.violations == 0, name + " no violations");
    v.require(b.commuting_equal == b.commuting_draws, name + " commuting equality");
    v.require(b.iff_inconsistent == 0, name + " iff bounds");
    if (b.generic_applicable) {
      generic += b.generic_draws;
      strict += b.generic_strict;
      v.require(b.generic_strict * 100 >= b.generic_draws * 99, name + " generic strictness");
    }
    info << " " << name << "=" << pinned_violations(d, 1000, 6) << "/1000";
  }
  v.detail << "draws=" << draws << " violations=" << violations << " min_gap=" << min_gap
           << " commuting_equal=" << commuting_equal << "/" << commuting << " generic_strict=" << strict << "/"
           << generic << " iff_inconsistent=" << iff_bad;
  return v;
}

Verdict criterion7() {
  Verdict v;
  const Datum d = catalog::toy(0.5);
  const ProductDistribution a{{toy_first_factor(-3.0, 2.0), scalar_gaussian(1.0)}};
  const ProductDistribution b{{toy_first_factor(-1.0, 4.0), scalar_gaussian(1.0)}};
  const ClosureReport mixed = convolution_closure_test(d, a, b, 0.0, mc(7));
  v.require(mixed.status == ClosureReport::Status::passed, "toy extremizer sum within 3 SE");

  const Datum ss = catalog::shannon_stam(0.5);
  const ProductDistribution g1{{scalar_gaussian(1.0), scalar_gaussian(1.0)}};
  const ProductDistribution g2{{scalar_gaussian(2.5), scalar_gaussian(2.5)}};
  const ClosureReport gauss = convolution_closure_test(ss, g1, g2, 0.0, mc(8));
  v.require(gauss.status == ClosureReport::Status::passed && gauss.sum.exact, "Gaussian pair closed form");
  v.detail << "toy sum deficit=" << mixed.sum.value << " (se " << mixed.sum.se << ") gaussian sum deficit="
           << gauss.sum.value << " exact=" << (gauss.sum.exact ? "yes" : "no");
  return v;
}

Verdict criterion8() {
  Verdict v;
  double worst = 0.0, worst_time = 0.0;
  for (std::uint64_t idx = 0; idx < 20; ++idx) {
    Rng rng = make_rng(8, Stream::corpus, idx);
    const Index dim = static_cast<Index>(1 + idx % 6);
    const PdMat sigma(random_spd(dim, 1e3, rng));
    const auto t0 = Clock::now();
    const FollmerResult r = follmer_energy_gaussian(sigma);
    const double elapsed = seconds_since(t0);
    worst = std::max(worst, std::abs(r.difference));
    worst_time = std::max(worst_time, elapsed);
    v.require(std::abs(r.difference) <= 1e-6, "energy matches relative entropy");
    v.require(elapsed < 1.0, "runtime");
  }
  v.detail << "sigmas=20 max|energy - D|=" << worst << " max_time=" << worst_time << "s";
  return v;
}

Verdict criterion9() {
  Verdict v;
  const BestConstant scaling = best_constant(catalog::scaling_violating());
  v.require(scaling.kind == BestConstant::Kind::infinite && scaling.reason == "scaling", "scaling negative");

  const DimensionCheck dim = dimension_check_sampled(catalog::kernel_witness(), 10000, 9);
  v.require(dim.witness.has_value() && dim.witness->stage == "coordinate" && dim.exhaustive_coordinates,
            "coordinate witness");

  const SolveResult solve = fixed_point_solve(catalog::kernel_witness());
  v.require(solve.status == SolveStatus::diverged, "solver diverges");

  const BestConstant unbounded = best_constant(catalog::kernel_witness());
  const bool reported = unbounded.kind == BestConstant::Kind::unresolved ||
                        (unbounded.kind == BestConstant::Kind::infinite && unbounded.witness.has_value());
  v.require(reported, "unbounded datum reported unresolved or infinite with witness");
  v.detail << "scaling: " << to_string(scaling.kind) << " (" << scaling.reason << "); witness stage="
           << (dim.witness ? dim.witness->stage : "none") << " after " << dim.candidates
           << " candidates; solver " << to_string(solve.status) << " after " << solve.iterations
           << " iterations; constant " << to_string(unbounded.kind) << " (" << unbounded.reason << ")";
  return v;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  int failures = 0;
  std::ostringstream info;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"geometric saturation", criterion1},
      {"fixed-point consistency", criterion2},
      {"Shannon-Stam structure", criterion3},
      {"toy inequality", criterion4},
      {"three-map example", criterion5},
      {"matrix inequality battery", [&] { return criterion6(info); }},
      {"convolution closure", criterion7},
      {"drift energy identity", criterion8},
      {"negative controls", criterion9},
  };
  for (std::size_t idx = 0; idx < criteria.size(); ++idx) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = criteria[idx].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", idx + 1, criteria[idx].first.c_str(),
                v.detail.str().c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("INFO general pinned draws with gap < -1e-9 (off-diagonal blocks allowed):%s\n", info.str().c_str());
  std::printf("%s %d/%zu criteria in %.1fs\n", failures == 0 ? "PASS" : "FAIL",
              static_cast<int>(criteria.size()) - failures, criteria.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
