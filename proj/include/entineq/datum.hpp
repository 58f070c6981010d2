#pragma once

// The entropy-inequality datum (c, d, B): k source spaces E_i with
// exponents c_i, m linear maps B_j : E_0 = E_1 + ... + E_k -> E^j with
// exponents d_j. Validity, the scaling and dimension conditions,
// equivalence transforms and the geometric test live here.

#include "entineq/linops.hpp"
#include "entineq/random.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace entineq {

class InvalidDatum : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Datum {
  std::vector<Index> n;  // dim E_i
  std::vector<Index> p;  // dim E^j
  std::vector<double> c;
  std::vector<double> d;
  std::vector<Mat> B;  // B[j] is p[j] x N

  Index k() const { return static_cast<Index>(n.size()); }
  Index m() const { return static_cast<Index>(B.size()); }
  Index total_dim() const;
  Index offset(Index i) const;
  /// B_j restricted to E_i, i.e. B_j * pi_i^T (p_j x n_i).
  Mat restricted(Index j, Index i) const;
};

/// Human-readable list of violated invariants; empty means valid.
std::vector<std::string> validate(const Datum& datum);
/// Throws InvalidDatum listing the violations.
void require_valid(const Datum& datum);

struct ScalingCheck {
  bool holds = false;
  double defect = 0.0;  // sum c_i n_i - sum d_j p_j
};
ScalingCheck scaling_check(const Datum& datum);

/// T = T_1 + ... + T_k with T_i a subspace of E_i (in E_i coordinates).
struct ProductSubspace {
  std::vector<Subspace> parts;

  Subspace embedded(const Datum& datum) const;
  void check_conforms(const Datum& datum) const;
  static ProductSubspace zero(const Datum& datum);
  static ProductSubspace full(const Datum& datum);
};

/// Block-diagonal positive-definite K = diag(K_1, ..., K_k).
class BlockPd {
 public:
  explicit BlockPd(std::vector<PdMat> blocks);
  static BlockPd identity(const Datum& datum);

  const std::vector<PdMat>& blocks() const { return blocks_; }
  const PdMat& block(Index i) const { return blocks_[static_cast<std::size_t>(i)]; }
  Index size() const { return static_cast<Index>(blocks_.size()); }
  Mat assemble() const;
  double frobenius() const;
  double max_condition() const;

 private:
  std::vector<PdMat> blocks_;
};

enum class Criticality { subcritical, critical, supercritical };
const char* to_string(Criticality c);

struct CriticalityCheck {
  Criticality kind = Criticality::critical;
  double lhs = 0.0;  // sum c_i dim(T_i)
  double rhs = 0.0;  // sum d_j dim(B_j T)
};
CriticalityCheck criticality_check(const Datum& datum, const ProductSubspace& t);

struct DimensionWitness {
  ProductSubspace subspace;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string stage;  // "coordinate", "random" or "structured"
};

struct DimensionCheck {
  std::optional<DimensionWitness> witness;
  std::size_t candidates = 0;
  bool exhaustive_coordinates = false;
};

/// Coordinate-aligned subspaces are enumerated exhaustively when N <= this cap.
constexpr Index kCoordinateEnumerationCap = 14;

/// Randomized falsifier for the dimension condition. A result without a
/// witness is not a proof that the condition holds.
DimensionCheck dimension_check_sampled(const Datum& datum, std::size_t trials, std::uint64_t seed);

/// B'_j = A_j^{-1} B_j diag(C_1, ..., C_k)^{-1}.
Datum apply_equivalence(const Datum& datum, std::span<const Mat> a, std::span<const Mat> cblocks);

struct GeometricCheck {
  bool geometric = false;
  std::vector<double> source_residuals;  // || sum_j d_j (B_j^T B_j)_ii - c_i I ||_F
  std::vector<double> target_residuals;  // || B_j B_j^T - I ||_F
  double max_residual() const;
};
GeometricCheck is_geometric(const Datum& datum, double tol = 1e-8);

/// E_i embedded in E_0.
Subspace source_subspace(const Datum& datum, Index i);
/// E^j realized in E_0 as the row space of B_j.
Subspace target_subspace(const Datum& datum, Index j);

// Candidate generators shared by the falsifier and its serial reference.

/// The product subspace made of the coordinate axes selected by mask.
ProductSubspace coordinate_subspace(const Datum& datum, std::uint64_t mask);
/// Parts of uniformly random rank spanned by Gaussian columns.
ProductSubspace random_product_subspace(const Datum& datum, Rng& rng);
/// Per-coordinate candidate parts from kernels and row spaces of the maps.
std::vector<std::vector<Subspace>> structured_candidate_parts(const Datum& datum);
/// Number of structured combinations tried (capped), and whether the cap applied.
std::pair<std::size_t, bool> structured_combination_count(const std::vector<std::vector<Subspace>>& parts);
/// The idx-th structured combination (random draw when capped).
ProductSubspace structured_combination(const std::vector<std::vector<Subspace>>& parts, std::size_t idx,
                                       bool capped, std::uint64_t seed);

}  // namespace entineq
