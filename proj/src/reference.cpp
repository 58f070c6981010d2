#include "entineq/reference.hpp"

namespace entineq::reference {

namespace {

std::optional<DimensionWitness> supercritical(const Datum& datum, ProductSubspace t, const char* stage) {
  const auto check = criticality_check(datum, t);
  if (check.kind != Criticality::supercritical) return std::nullopt;
  return DimensionWitness{std::move(t), check.lhs, check.rhs, stage};
}

void dfs(const Datum& datum, const std::vector<Subspace>& targets, Index i, Index j, const Subspace& current,
         std::vector<bool>& signs, std::vector<IndependentSubspace>& out) {
  if (current.is_zero()) return;
  if (j == datum.m()) {
    out.push_back(IndependentSubspace{i, signs, current});
    return;
  }
  const Subspace& t = targets[static_cast<std::size_t>(j)];
  signs.push_back(false);
  dfs(datum, targets, i, j + 1, intersect(current, complement(t)), signs, out);
  signs.back() = true;
  dfs(datum, targets, i, j + 1, intersect(current, t), signs, out);
  signs.pop_back();
}

}  // namespace

DimensionCheck dimension_check(const Datum& datum, std::size_t trials, std::uint64_t seed) {
  require_valid(datum);
  DimensionCheck out;
  const Index total = datum.total_dim();
  if (total <= kCoordinateEnumerationCap) {
    out.exhaustive_coordinates = true;
    const std::size_t count = std::size_t{1} << total;
    out.candidates += count;
    for (std::size_t mask = 0; mask < count && !out.witness; ++mask)
      out.witness = supercritical(datum, coordinate_subspace(datum, mask), "coordinate");
    if (out.witness) return out;
  }
  out.candidates += trials;
  for (std::size_t t = 0; t < trials && !out.witness; ++t) {
    Rng rng = make_rng(seed, Stream::dimension_random, t);
    out.witness = supercritical(datum, random_product_subspace(datum, rng), "random");
  }
  if (out.witness) return out;
  const auto cands = structured_candidate_parts(datum);
  const auto [combos, capped] = structured_combination_count(cands);
  out.candidates += combos;
  for (std::size_t idx = 0; idx < combos && !out.witness; ++idx)
    out.witness = supercritical(datum, structured_combination(cands, idx, capped, seed), "structured");
  return out;
}

std::vector<IndependentSubspace> independent_subspaces(const Datum& datum) {
  require_valid(datum);
  if (!is_geometric(datum, 1e-6).geometric) throw PreconditionError("datum is not geometric");
  std::vector<Subspace> targets;
  for (Index j = 0; j < datum.m(); ++j) targets.push_back(target_subspace(datum, j));
  std::vector<IndependentSubspace> out;
  std::vector<bool> signs;
  for (Index i = 0; i < datum.k(); ++i) dfs(datum, targets, i, 0, source_subspace(datum, i), signs, out);
  return out;
}

McEstimate entropy_mixture_mc(const GaussianMixture& mix, const McSettings& settings) {
  const BatchPlan plan = make_batch_plan(settings);
  std::vector<double> means;
  for (std::size_t b = 0; b < plan.batches; ++b) means.push_back(mixture_entropy_batch(mix, plan, settings.seed, b));
  return combine_batches(plan, means);
}

DeficitEstimate entropy_deficit(const Datum& datum, const ProductDistribution& dist, double cg,
                            const McSettings& settings) {
  const DeficitModel model = make_deficit_model(datum, dist, cg);
  if (dist.all_gaussian()) return DeficitEstimate{deficit_closed_form(model), 0.0, true};
  const BatchPlan plan = make_batch_plan(settings);
  std::vector<double> means;
  for (std::size_t b = 0; b < plan.batches; ++b) means.push_back(deficit_batch(model, plan, settings.seed, b));
  const McEstimate est = combine_batches(plan, means);
  return DeficitEstimate{est.value, est.se, false};
}

LemmaBattery lemma_battery(const Datum& datum, std::size_t draws, std::uint64_t seed) {
  const StructureReport report = extremizer_report(datum);
  LemmaBattery acc;
  acc.generic_applicable =
      std::any_of(datum.p.begin(), datum.p.end(), [&](Index pj) { return pj < datum.total_dim(); });
  for (std::size_t u = 0; u < draws; ++u) {
    LemmaResult commuting, generic;
    lemma_battery_draw(datum, report, seed, u, commuting, generic);
    lemma_battery_tally(acc, commuting, generic);
  }
  return acc;
}

}  // namespace entineq::reference
