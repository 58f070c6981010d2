#pragma once

// Structural extremality check for a product distribution on a geometric
// datum: projections onto K^i_0, K^i_1, ... must be independent, and the
// K_dep marginal must be Gaussian with covariance sum_l s_l P_l over a
// critical decomposition.

#include "entineq/entropy.hpp"
#include "entineq/structure.hpp"

#include <string>
#include <vector>

namespace entineq {

struct ExtremalCheck {
  bool independence_ok = false;
  double max_cross_cov = 0.0;  // largest ||P_a Cov(X_i) P_b||_F over distinct pieces
  bool gaussian_dep_ok = false;
  std::string dep_reason;
  std::vector<CriticalPart> induced_parts;
  bool verdict = false;
  DeficitEstimate deficit;
  bool cross_validated = false;  // verdict agrees with deficit ~ 0
  std::string note;
};

ExtremalCheck check_extremal_distribution(const Datum& datum, const ProductDistribution& dist,
                                          const StructureReport& report, const McSettings& settings);

}  // namespace entineq
