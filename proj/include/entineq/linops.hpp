#pragma once

// Dense real linear algebra at desk scale: symmetric eigenproblems, matrix
// square roots, rank-revealing orthonormalization and subspace lattice
// operations. Matrices are Eigen dynamic matrices; the wrapper types below
// carry the invariants (symmetry, definiteness, orthonormal bases).

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace entineq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest absolute entry (0 for empty matrices).
double max_abs(const Mat& a);

bool all_finite(const Mat& a);

/// Symmetric matrix. Construction rejects inputs whose asymmetry exceeds
/// 1e-10 * (1 + max|a|) and stores the symmetrized average.
class SymMat {
 public:
  explicit SymMat(const Mat& a);
  static SymMat identity(Index n);

  Index dim() const { return a_.rows(); }
  const Mat& matrix() const { return a_; }

 private:
  Mat a_;
};

struct EigenPairs {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns, first nonzero component positive
};

EigenPairs eig_sym(const SymMat& a);

/// Positive-definite matrix with a cached eigendecomposition.
/// Invariant: smallest eigenvalue > 1e-12 * largest, largest > 0.
class PdMat {
 public:
  explicit PdMat(const SymMat& a);
  explicit PdMat(const Mat& a) : PdMat(SymMat(a)) {}
  static PdMat identity(Index n);

  Index dim() const { return a_.rows(); }
  const Mat& matrix() const { return a_; }
  const Vec& eigenvalues() const { return eig_.values; }
  const Mat& eigenvectors() const { return eig_.vectors; }

  double log_det() const;
  double condition() const;
  Mat inverse() const;
  /// V f(lambda) V^T for a scalar function of the spectrum.
  template <typename F>
  Mat spectral(F&& f) const {
    Vec mapped = eig_.values.unaryExpr(f);
    return eig_.vectors * mapped.asDiagonal() * eig_.vectors.transpose();
  }

 private:
  Mat a_;
  EigenPairs eig_;
};

PdMat sqrtm_pd(const PdMat& a);
PdMat inv_sqrtm_pd(const PdMat& a);

/// Linear subspace of R^ambient stored as an orthonormal basis
/// (ambient x r). r = 0 is the zero subspace. Identity is the projector.
class Subspace {
 public:
  explicit Subspace(Index ambient = 0);
  /// Wraps a basis that is already orthonormal (checked to 1e-9).
  static Subspace from_orthonormal(Mat basis);
  static Subspace full(Index ambient);

  Index ambient() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return basis_.cols() == 0; }
  const Mat& basis() const { return basis_; }
  Mat projector() const { return basis_ * basis_.transpose(); }

  /// True when b is contained in this subspace (projector absorption).
  bool contains(const Subspace& b, double tol = 1e-8) const;
  bool orthogonal_to(const Subspace& b, double tol = 1e-8) const;

 private:
  Mat basis_;
};

bool same_subspace(const Subspace& a, const Subspace& b, double tol = 1e-8);

/// Default rank tolerance factor: 1e-9 * max(rows, cols).
double default_tol_scale(Index rows, Index cols);

/// Orthonormal basis of the column space. Singular values below
/// tol_scale * max(sigma_max, reference) are treated as zero; pass the
/// natural scale as reference when the input may be entirely rounding noise.
Subspace orthonormalize(const Mat& columns, std::optional<double> tol_scale = std::nullopt, double reference = 0.0);

Index numerical_rank(const Mat& m, std::optional<double> tol_scale = std::nullopt, double reference = 0.0);

Subspace image(const Mat& m);
Subspace kernel(const Mat& m, double reference = 0.0);
Subspace intersect(const Subspace& a, const Subspace& b);
Subspace complement(const Subspace& a);
/// Orthogonal direct sum; throws LinalgError unless the inputs are
/// pairwise orthogonal within 1e-8.
Subspace direct_sum(std::span<const Subspace> parts);
/// Span of the union, no orthogonality required.
Subspace span_of(std::span<const Subspace> parts, Index ambient);
Vec project(const Subspace& a, const Vec& x);

/// Embeds a subspace of R^n as a subspace of R^ambient at the given row offset.
Subspace embed(const Subspace& s, Index ambient, Index offset);

}  // namespace entineq
