#pragma once

// Seeded random streams. Every randomized routine derives one generator per
// work item from (seed, stream tag, item index), so results do not depend on
// thread count or scheduling.

#include "entineq/linops.hpp"

#include <cstdint>
#include <random>

namespace entineq {

using Rng = std::mt19937_64;

enum class Stream : std::uint64_t {
  dimension_random = 1,
  dimension_structured = 2,
  mixture_entropy = 3,
  deficit = 4,
  pinned_psd = 5,
  extremal = 6,
  corpus = 7,
};

Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index);

Mat gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
Mat random_orthogonal(Index n, Rng& rng);

/// Symmetric positive definite matrix with eigenvalues drawn log-uniformly
/// in [1/sqrt(cond), sqrt(cond)].
Mat random_spd(Index n, double cond, Rng& rng);

}  // namespace entineq
