#include "entineq/linops.hpp"

#include <algorithm>
#include <cmath>

namespace entineq {

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool all_finite(const Mat& a) { return a.allFinite(); }

SymMat::SymMat(const Mat& a) {
  if (a.rows() != a.cols()) throw LinalgError("SymMat: matrix is not square");
  if (!a.allFinite()) throw LinalgError("SymMat: non-finite entry");
  const double asym = max_abs(a - a.transpose());
  if (asym > 1e-10 * (1.0 + max_abs(a))) throw LinalgError("SymMat: matrix is not symmetric");
  a_ = 0.5 * (a + a.transpose());
}

SymMat SymMat::identity(Index n) { return SymMat(Mat::Identity(n, n)); }

EigenPairs eig_sym(const SymMat& a) {
  const Index n = a.dim();
  if (n == 0) return {Vec(0), Mat(0, 0)};
  Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix());
  if (es.info() != Eigen::Success) throw LinalgError("eig_sym: solver failed");
  EigenPairs out{es.eigenvalues(), es.eigenvectors()};
  // Sign convention: first component that is not negligible is positive.
  for (Index col = 0; col < n; ++col) {
    auto v = out.vectors.col(col);
    const double thresh = 1e-12 * v.cwiseAbs().maxCoeff();
    for (Index r = 0; r < n; ++r) {
      if (std::abs(v(r)) > thresh) {
        if (v(r) < 0) v = -v;
        break;
      }
    }
  }
  return out;
}

PdMat::PdMat(const SymMat& a) : a_(a.matrix()), eig_(eig_sym(a)) {
  if (a_.rows() == 0) return;
  const double lo = eig_.values(0);
  const double hi = eig_.values(eig_.values.size() - 1);
  if (!(hi > 0.0) || !(lo > 1e-12 * hi)) throw LinalgError("PdMat: matrix is not positive definite");
}

PdMat PdMat::identity(Index n) { return PdMat(SymMat::identity(n)); }

double PdMat::log_det() const { return eig_.values.array().log().sum(); }

double PdMat::condition() const {
  if (dim() == 0) return 1.0;
  return eig_.values(dim() - 1) / eig_.values(0);
}

Mat PdMat::inverse() const {
  return spectral([](double x) { return 1.0 / x; });
}

PdMat sqrtm_pd(const PdMat& a) {
  return PdMat(SymMat(a.spectral([](double x) { return std::sqrt(x); })));
}

PdMat inv_sqrtm_pd(const PdMat& a) {
  return PdMat(SymMat(a.spectral([](double x) { return 1.0 / std::sqrt(x); })));
}

Subspace::Subspace(Index ambient) : basis_(ambient, 0) {}

Subspace Subspace::from_orthonormal(Mat basis) {
  const Index r = basis.cols();
  if (r > 0 && max_abs(basis.transpose() * basis - Mat::Identity(r, r)) > 1e-9)
    throw LinalgError("Subspace: basis is not orthonormal");
  Subspace s(basis.rows());
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::full(Index ambient) { return from_orthonormal(Mat::Identity(ambient, ambient)); }

bool Subspace::contains(const Subspace& b, double tol) const {
  if (b.ambient() != ambient()) throw LinalgError("contains: ambient mismatch");
  if (b.is_zero()) return true;
  const Mat residual = b.basis() - basis_ * (basis_.transpose() * b.basis());
  return max_abs(residual) <= tol;
}

bool Subspace::orthogonal_to(const Subspace& b, double tol) const {
  if (b.ambient() != ambient()) throw LinalgError("orthogonal_to: ambient mismatch");
  if (is_zero() || b.is_zero()) return true;
  return max_abs(basis_.transpose() * b.basis()) <= tol;
}

bool same_subspace(const Subspace& a, const Subspace& b, double tol) {
  if (a.ambient() != b.ambient()) return false;
  return max_abs(a.projector() - b.projector()) <= tol;
}

double default_tol_scale(Index rows, Index cols) {
  return 1e-9 * static_cast<double>(std::max<Index>({rows, cols, 1}));
}

namespace {

struct Svd {
  Mat u;
  Vec s;
  Mat v;
  Index rank = 0;
};

Svd full_svd(const Mat& m, std::optional<double> tol_scale, double reference = 0.0) {
  Svd out;
  if (m.size() == 0) {
    out.u = Mat::Identity(m.rows(), m.rows());
    out.v = Mat::Identity(m.cols(), m.cols());
    out.s = Vec(0);
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.s = svd.singularValues();
  const double scale = tol_scale.value_or(default_tol_scale(m.rows(), m.cols()));
  const double smax = std::max(out.s.size() ? out.s(0) : 0.0, reference);
  if (smax > 0.0) {
    for (Index i = 0; i < out.s.size(); ++i)
      if (out.s(i) >= scale * smax) ++out.rank;
  }
  return out;
}

}  // namespace

Index numerical_rank(const Mat& m, std::optional<double> tol_scale, double reference) {
  return full_svd(m, tol_scale, reference).rank;
}

Subspace orthonormalize(const Mat& columns, std::optional<double> tol_scale, double reference) {
  const Svd svd = full_svd(columns, tol_scale, reference);
  return Subspace::from_orthonormal(svd.u.leftCols(svd.rank));
}

Subspace image(const Mat& m) { return orthonormalize(m); }

Subspace kernel(const Mat& m, double reference) {
  if (m.rows() == 0) return Subspace::full(m.cols());
  const Svd svd = full_svd(m, std::nullopt, reference);
  return Subspace::from_orthonormal(svd.v.rightCols(m.cols() - svd.rank));
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  if (a.ambient() != b.ambient()) throw LinalgError("intersect: ambient mismatch");
  const Index n = a.ambient();
  Mat stacked(2 * n, n);
  stacked.topRows(n) = a.projector() - Mat::Identity(n, n);
  stacked.bottomRows(n) = b.projector() - Mat::Identity(n, n);
  // Projector differences have unit scale.
  const Svd svd = full_svd(stacked, std::nullopt, 1.0);
  return Subspace::from_orthonormal(svd.v.rightCols(n - svd.rank));
}

Subspace complement(const Subspace& a) {
  if (a.is_zero()) return Subspace::full(a.ambient());
  return kernel(a.basis().transpose());
}

Subspace direct_sum(std::span<const Subspace> parts) {
  if (parts.empty()) throw LinalgError("direct_sum: no parts");
  const Index n = parts.front().ambient();
  Index total = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].ambient() != n) throw LinalgError("direct_sum: ambient mismatch");
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (!parts[i].orthogonal_to(parts[j])) throw LinalgError("direct_sum: parts are not orthogonal");
    total += parts[i].dim();
  }
  Mat basis(n, total);
  Index col = 0;
  for (const auto& p : parts) {
    basis.middleCols(col, p.dim()) = p.basis();
    col += p.dim();
  }
  return orthonormalize(basis);
}

Subspace span_of(std::span<const Subspace> parts, Index ambient) {
  Index total = 0;
  for (const auto& p : parts) {
    if (p.ambient() != ambient) throw LinalgError("span_of: ambient mismatch");
    total += p.dim();
  }
  if (total == 0) return Subspace(ambient);
  Mat basis(ambient, total);
  Index col = 0;
  for (const auto& p : parts) {
    basis.middleCols(col, p.dim()) = p.basis();
    col += p.dim();
  }
  return orthonormalize(basis);
}

Vec project(const Subspace& a, const Vec& x) {
  if (x.size() != a.ambient()) throw LinalgError("project: ambient mismatch");
  return a.basis() * (a.basis().transpose() * x);
}

Subspace embed(const Subspace& s, Index ambient, Index offset) {
  if (offset < 0 || offset + s.ambient() > ambient) throw LinalgError("embed: out of range");
  Mat basis = Mat::Zero(ambient, s.dim());
  basis.middleRows(offset, s.ambient()) = s.basis();
  return Subspace::from_orthonormal(std::move(basis));
}

}  // namespace entineq
