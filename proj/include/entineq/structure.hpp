#pragma once

// Extremizer structure of geometric data: independent subspaces
// E_i ∩ V_1 ∩ ... ∩ V_m with V_j in {E^j, E^j-perp}, the dependent subspace
// K_dep, critical decompositions induced by a covariance, and the resulting
// classification of extremizer factors.

#include "entineq/datum.hpp"
#include "entineq/gaussopt.hpp"

#include <optional>
#include <string>
#include <vector>

namespace entineq {

class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr Index kMaxSignMaps = 20;

struct IndependentSubspace {
  Index i = 0;
  std::vector<bool> signs;  // signs[j]: true for E^j, false for its complement
  Subspace space;           // ambient N, inside the embedded E_i
};

/// Enumerates all 2^m sign patterns for each coordinate (in parallel) and
/// keeps the nonzero intersections. Requires is_geometric(datum, 1e-6) and m <= 20.
std::vector<IndependentSubspace> independent_subspaces(const Datum& datum);

/// Nonzero E_i ∩ ⋂ V_j for one sign pattern, or the zero subspace.
Subspace sign_pattern_intersection(const Datum& datum, const std::vector<Mat>& target_projectors, Index i,
                                   std::uint64_t pattern);

struct DependentSubspace {
  std::vector<Subspace> k0;  // K^i_0, ambient N
  Subspace k_dep;            // direct sum of the K^i_0
};

DependentSubspace dependent_subspace(const Datum& datum, const std::vector<IndependentSubspace>& independents);

struct CriticalPart {
  Subspace space;  // ambient N
  double variance = 0.0;
  ProductSubspace product;
  CriticalityCheck check;
};

struct DecompositionSettings {
  double group_tol = 1e-7;
  double commute_tol = 1e-7;
};

/// Splits K_dep into eigenspaces of sigma (an N x N covariance, compressed
/// to K_dep) and checks each part is product-form and critical. Throws
/// DecompositionError otherwise.
std::vector<CriticalPart> critical_decomposition(const Datum& datum, const Subspace& k_dep, const SymMat& sigma,
                                                 const DecompositionSettings& settings = {});

struct FactorClass {
  enum class Kind { arbitrary, gaussian };
  Kind kind = Kind::gaussian;
  Index i = 0;
  Subspace space;
  std::optional<std::size_t> part;  // critical part index for Gaussian factors
  std::string text;
};
const char* to_string(FactorClass::Kind kind);

struct StructureReport {
  std::vector<IndependentSubspace> independents;
  /// per_coordinate[i] = (K^i_0, K^i_1, ...), ambient N.
  std::vector<std::vector<Subspace>> per_coordinate;
  DependentSubspace dependent;
  std::vector<CriticalPart> critical_parts;
  std::vector<FactorClass> factors;

  bool gaussian_only() const { return independents.empty(); }
};

/// Full report; sigma defaults to the identity on E_0.
StructureReport extremizer_report(const Datum& datum, const std::optional<SymMat>& sigma = std::nullopt,
                                  const DecompositionSettings& settings = {});

struct TargetDecompositionCheck {
  bool ok = false;
  std::vector<double> target_residuals;  // || P_{E^j} - P(Π_j K_dep) - sum P(indep in E^j) ||_F
  std::vector<double> part_residuals;    // || P(Π_j K_dep) - sum_l P(Π_j K^l) ||_F
};

TargetDecompositionCheck verify_target_decomposition(const Datum& datum, const StructureReport& report,
                                                     double tol = 1e-7);

}  // namespace entineq
