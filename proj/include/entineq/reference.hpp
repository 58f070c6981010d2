#pragma once

// Serial reference implementations of the parallel kernels. They share the
// per-item work (and seeded streams) with the parallel drivers where the
// results must agree bit for bit, and use an independent algorithm for the
// independent-subspace enumeration.

#include "entineq/datum.hpp"
#include "entineq/entropy.hpp"
#include "entineq/lemma.hpp"
#include "entineq/structure.hpp"

#include <vector>

namespace entineq::reference {

DimensionCheck dimension_check(const Datum& datum, std::size_t trials, std::uint64_t seed);

/// Depth-first search over sign choices with successive SVD-based
/// intersections, pruning as soon as the running intersection is zero.
std::vector<IndependentSubspace> independent_subspaces(const Datum& datum);

McEstimate entropy_mixture_mc(const GaussianMixture& mix, const McSettings& settings);

DeficitEstimate entropy_deficit(const Datum& datum, const ProductDistribution& dist, double cg,
                            const McSettings& settings);

LemmaBattery lemma_battery(const Datum& datum, std::size_t draws, std::uint64_t seed);

}  // namespace entineq::reference
