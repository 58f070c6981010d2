#pragma once

// Gaussian optimization over block covariances K = diag(K_1, ..., K_k):
//
//   F(K) = sum_i c_i log det K_i - sum_j d_j log det(B_j K B_j^T)
//
// Stationary points satisfy the block fixed-point equation
//
//   M_i(K) := sum_j d_j [B_j^T (B_j K B_j^T)^{-1} B_j]_ii = c_i K_i^{-1},
//
// the sharp Gaussian constant is half the supremum of F (under the scaling
// condition), and any solution K maps the datum to a geometric one.

#include "entineq/datum.hpp"

#include <optional>
#include <string>
#include <vector>

namespace entineq {

class SingularPushforward : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double objective(const Datum& datum, const BlockPd& k);

struct Residual {
  double norm = 0.0;
  std::vector<Mat> defects;  // M_i(K) - c_i K_i^{-1}
};
Residual residual(const Datum& datum, const BlockPd& k);

/// M_i(K) for every block.
std::vector<Mat> fixed_point_operator(const Datum& datum, const BlockPd& k);

enum class SolveStatus { converged, diverged, max_iter };
const char* to_string(SolveStatus s);

struct SolverSettings {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  double damping = 0.5;
};

struct SolveResult {
  SolveStatus status = SolveStatus::max_iter;
  BlockPd k{{}};
  double residual = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::size_t newton_steps = 0;
  std::vector<double> objective_trace;
};

/// Damped iteration K_i <- (1 - a) K_i + a c_i M_i(K)^{-1}. The step a is
/// halved (down to a/64) while the objective would drop by more than 1e-12.
/// Once the normalized defect is below 1e-3, Newton steps in the geodesic
/// parametrization K^{1/2} exp(S) K^{1/2} are tried first; they fall back to
/// the damped step when backtracking cannot keep the objective from dropping.
SolveResult fixed_point_solve(const Datum& datum, const SolverSettings& settings = {},
                              std::optional<BlockPd> k0 = std::nullopt);

struct ConstantSettings {
  SolverSettings solver;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
};

struct BestConstant {
  enum class Kind { finite, infinite, unresolved };
  Kind kind = Kind::unresolved;
  double value = 0.0;  // C_g when finite, best lower bound when unresolved
  std::string reason;
  std::optional<BlockPd> certificate;
  std::optional<DimensionWitness> witness;
  std::optional<SolveResult> solve;
  ScalingCheck scaling;
};
const char* to_string(BestConstant::Kind kind);

/// Checks scaling, then the sampled dimension condition, then solves. A
/// scaling failure still carries a dimension witness when the falsifier finds one.
BestConstant best_constant(const Datum& datum, const ConstantSettings& settings = {});

struct Geometrization {
  Datum datum;
  std::vector<PdMat> a;  // (B_j K B_j^T)^{1/2}
  std::vector<PdMat> c;  // K_i^{-1/2}
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scale-free fixed-point defect: max_i || K_i^{1/2} M_i(K) K_i^{1/2} - c_i I ||_F,
/// which equals the geometric residual of the transformed datum.
double normalized_defect(const Datum& datum, const BlockPd& k);

/// B'_j = (B_j K B_j^T)^{-1/2} B_j K^{1/2}. Requires normalized_defect <= 1e-6.
Geometrization geometrize(const Datum& datum, const BlockPd& k);

/// sum_i c_i h(N(0, K_i)) - sum_j d_j h(N(0, B_j K B_j^T)).
double gaussian_gap(const Datum& datum, const BlockPd& k);

}  // namespace entineq
