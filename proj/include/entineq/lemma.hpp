#pragma once

// The rigidity matrix inequality for geometric data
//
//   sum_i c_i Tr((A_i - I)^2) >= sum_j d_j Tr(((B_j A^2 B_j^T)^{1/2} - I)^2)
//
// with equality iff (I - P_j) A P_j = 0 for every j, where P_j projects onto
// the row space of B_j. The inequality holds for block-diagonal A; general
// members of the pinned set (nonzero off-diagonal blocks) can violate it.

#include "entineq/datum.hpp"
#include "entineq/random.hpp"
#include "entineq/structure.hpp"

#include <vector>

namespace entineq {

/// PSD matrix on E_0 together with its diagonal blocks.
struct PinnedBlockPsd {
  Mat a;
  std::vector<Mat> blocks;

  /// Checks PSD (smallest eigenvalue >= -1e-10 * max(1, ||a||)) and extracts blocks.
  static PinnedBlockPsd from_matrix(const Datum& datum, const Mat& a);
  bool block_diagonal(double tol = 1e-12) const;
};

/// Random positive definite blocks (spectrum in [0.05, 3]) assembled block-diagonally.
PinnedBlockPsd random_block_diagonal_psd(const Datum& datum, Rng& rng);

/// Exact sampler for the pinned set: A = D^{1/2} G D^{1/2} with D = diag(A_i)
/// and G a random PSD matrix whose diagonal blocks are identities.
PinnedBlockPsd random_pinned_psd(const Datum& datum, const std::vector<Mat>& blocks, Rng& rng);

/// Block-diagonal A commuting with every P_j: a positive multiple of the
/// projector onto each critical part plus random PSD maps on the independent subspaces.
PinnedBlockPsd random_commuting_psd(const Datum& datum, const StructureReport& report, Rng& rng);

struct LemmaResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  bool equality = false;
  std::vector<double> residuals;  // ||(I - P_j) A P_j||_F
  /// For block-diagonal A: sum_j d_j r_j^2 / ||A|| <= gap <= 2 sum_j d_j sqrt(p_j) r_j.
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool block_diagonal = false;
  bool iff_consistent = false;
};

LemmaResult lemma_matrix_inequality_test(const Datum& datum, const PinnedBlockPsd& a);

struct LemmaBattery {
  std::size_t draws = 0;
  std::size_t violations = 0;  // gap < -1e-9
  double min_gap = 0.0;
  std::size_t commuting_draws = 0;
  std::size_t commuting_equal = 0;  // equality and residuals <= 1e-8
  std::size_t generic_draws = 0;
  std::size_t generic_strict = 0;
  std::size_t iff_inconsistent = 0;
  bool generic_applicable = true;  // false when every E^j = E_0
};

/// `draws` commuting draws and `draws` generic block-diagonal draws.
LemmaBattery lemma_battery(const Datum& datum, std::size_t draws, std::uint64_t seed);
/// Per-draw work shared with the serial reference.
void lemma_battery_draw(const Datum& datum, const StructureReport& report, std::uint64_t seed, std::size_t idx,
                        LemmaResult& commuting, LemmaResult& generic);
void lemma_battery_tally(LemmaBattery& acc, const LemmaResult& commuting, const LemmaResult& generic);

/// Count of general pinned draws (random off-diagonal blocks) with gap < -1e-9.
std::size_t pinned_violations(const Datum& datum, std::size_t draws, std::uint64_t seed);

}  // namespace entineq
