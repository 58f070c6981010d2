#include "entineq/gaussopt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace entineq {

namespace {

constexpr double kDivergenceBound = 1e12;
constexpr double kMinStep = 1.0 / 64.0;
constexpr double kAscentSlack = 1e-12;
constexpr double kNewtonSwitch = 1e-3;

Mat pushforward_cov(const Datum& datum, const Mat& kfull, Index j) {
  const Mat& b = datum.B[static_cast<std::size_t>(j)];
  Mat s = b * kfull * b.transpose();
  return 0.5 * (s + s.transpose());
}

PdMat checked_pd(const Mat& s, const char* what) {
  try {
    PdMat pd{s};
    if (pd.condition() > kDivergenceBound) throw LinalgError("ill-conditioned");
    return pd;
  } catch (const LinalgError&) {
    throw SingularPushforward(std::string(what) + " is numerically singular");
  }
}

}  // namespace

double objective(const Datum& datum, const BlockPd& k) {
  const Mat kfull = k.assemble();
  double f = 0.0;
  for (Index i = 0; i < datum.k(); ++i) f += datum.c[static_cast<std::size_t>(i)] * k.block(i).log_det();
  for (Index j = 0; j < datum.m(); ++j) {
    const PdMat s = checked_pd(pushforward_cov(datum, kfull, j), "B_j K B_j^T");
    f -= datum.d[static_cast<std::size_t>(j)] * s.log_det();
  }
  return f;
}

std::vector<Mat> fixed_point_operator(const Datum& datum, const BlockPd& k) {
  const Mat kfull = k.assemble();
  const Index total = datum.total_dim();
  Mat g = Mat::Zero(total, total);
  for (Index j = 0; j < datum.m(); ++j) {
    const Mat& b = datum.B[static_cast<std::size_t>(j)];
    const PdMat s = checked_pd(pushforward_cov(datum, kfull, j), "B_j K B_j^T");
    g += datum.d[static_cast<std::size_t>(j)] * b.transpose() * s.inverse() * b;
  }
  std::vector<Mat> out;
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    Mat mi = g.block(datum.offset(i), datum.offset(i), ni, ni);
    out.push_back(0.5 * (mi + mi.transpose()));
  }
  return out;
}

namespace {

Residual residual_from(const Datum& datum, const BlockPd& k, const std::vector<Mat>& m) {
  Residual r;
  double sq = 0.0;
  for (Index i = 0; i < datum.k(); ++i) {
    Mat defect = m[static_cast<std::size_t>(i)] - datum.c[static_cast<std::size_t>(i)] * k.block(i).inverse();
    sq += defect.squaredNorm();
    r.defects.push_back(std::move(defect));
  }
  r.norm = std::sqrt(sq);
  return r;
}

BlockPd blend(const BlockPd& a, const std::vector<Mat>& b, double alpha) {
  std::vector<PdMat> blocks;
  for (Index i = 0; i < a.size(); ++i)
    blocks.emplace_back(SymMat((1.0 - alpha) * a.block(i).matrix() + alpha * b[static_cast<std::size_t>(i)]));
  return BlockPd(std::move(blocks));
}

/// Newton step for S -> F(K^{1/2} exp(S) K^{1/2}) over block-diagonal symmetric S.
/// With P_j the projector onto the row space of (B_j K B_j^T)^{-1/2} B_j K^{1/2},
/// the gradient is c_i I - sum_j d_j (P_j)_ii and the negative Hessian is
/// S -> sum_j d_j ||(I - P_j) S P_j||_F^2. Returns the minimum-norm step.
std::vector<Mat> newton_direction(const Datum& datum, const BlockPd& k, std::vector<PdMat>& roots) {
  const Index total = datum.total_dim();
  Mat root_k = Mat::Zero(total, total);
  roots.clear();
  for (Index i = 0; i < datum.k(); ++i) {
    roots.push_back(sqrtm_pd(k.block(i)));
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    root_k.block(datum.offset(i), datum.offset(i), ni, ni) = roots.back().matrix();
  }
  const Mat kfull = k.assemble();
  std::vector<Mat> proj;
  Mat psum = Mat::Zero(total, total);
  for (Index j = 0; j < datum.m(); ++j) {
    const PdMat s = checked_pd(pushforward_cov(datum, kfull, j), "B_j K B_j^T");
    const Mat b = inv_sqrtm_pd(s).matrix() * datum.B[static_cast<std::size_t>(j)] * root_k;
    proj.push_back(b.transpose() * b);
    psum += datum.d[static_cast<std::size_t>(j)] * proj.back();
  }

  // Orthonormal basis of block-diagonal symmetric matrices.
  std::vector<std::pair<Index, Index>> coords;
  std::vector<Index> owner;
  for (Index i = 0; i < datum.k(); ++i)
    for (Index a = 0; a < datum.n[static_cast<std::size_t>(i)]; ++a)
      for (Index b = a; b < datum.n[static_cast<std::size_t>(i)]; ++b) {
        coords.emplace_back(datum.offset(i) + a, datum.offset(i) + b);
        owner.push_back(i);
      }
  const auto dim = static_cast<Index>(coords.size());
  auto basis = [&](Index u) {
    Mat e = Mat::Zero(total, total);
    const auto [a, b] = coords[static_cast<std::size_t>(u)];
    if (a == b) {
      e(a, a) = 1.0;
    } else {
      e(a, b) = e(b, a) = std::numbers::sqrt2 / 2.0;
    }
    return e;
  };

  Vec g(dim);
  std::vector<Mat> es;
  for (Index u = 0; u < dim; ++u) {
    es.push_back(basis(u));
    const auto [a, b] = coords[static_cast<std::size_t>(u)];
    const double ci = datum.c[static_cast<std::size_t>(owner[static_cast<std::size_t>(u)])];
    const double grad_ab = (a == b ? ci : 0.0) - psum(a, b);
    g(u) = a == b ? grad_ab : std::numbers::sqrt2 * grad_ab;
  }
  Mat hess = Mat::Zero(dim, dim);
  for (Index j = 0; j < datum.m(); ++j) {
    const Mat& p = proj[static_cast<std::size_t>(j)];
    const Mat q = Mat::Identity(total, total) - p;
    const double dj = datum.d[static_cast<std::size_t>(j)];
    for (Index u = 0; u < dim; ++u) {
      const Mat left = es[static_cast<std::size_t>(u)] * q;
      for (Index v = u; v < dim; ++v) {
        const double val = dj * (left * es[static_cast<std::size_t>(v)] * p).trace();
        hess(u, v) += val;
        if (v != u) hess(v, u) += val;
      }
    }
  }
  hess = 0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es_h(hess);
  const double top = std::max(es_h.eigenvalues().maxCoeff(), 0.0);
  Vec coeff = Vec::Zero(dim);
  for (Index r = 0; r < dim; ++r) {
    const double lam = es_h.eigenvalues()(r);
    if (lam > 1e-10 * top) coeff += es_h.eigenvectors().col(r) * (es_h.eigenvectors().col(r).dot(g) / lam);
  }
  Mat step = Mat::Zero(total, total);
  for (Index u = 0; u < dim; ++u) step += coeff(u) * es[static_cast<std::size_t>(u)];
  std::vector<Mat> out;
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    out.push_back(step.block(datum.offset(i), datum.offset(i), ni, ni));
  }
  return out;
}

BlockPd exp_update(const std::vector<PdMat>& roots, const std::vector<Mat>& step, double t) {
  std::vector<PdMat> blocks;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Mat> es(t * step[i]);
    const Mat e = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                  es.eigenvectors().transpose();
    blocks.emplace_back(SymMat(roots[i].matrix() * e * roots[i].matrix()));
  }
  return BlockPd(std::move(blocks));
}

}  // namespace

Residual residual(const Datum& datum, const BlockPd& k) {
  return residual_from(datum, k, fixed_point_operator(datum, k));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::max_iter: return "max-iter";
  }
  return "?";
}

SolveResult fixed_point_solve(const Datum& datum, const SolverSettings& settings, std::optional<BlockPd> k0) {
  require_valid(datum);
  if (!(settings.damping > 0.0 && settings.damping <= 1.0))
    throw std::invalid_argument("fixed_point_solve: damping must lie in (0, 1]");
  SolveResult out;
  out.k = k0 ? std::move(*k0) : BlockPd::identity(datum);
  if (out.k.size() != datum.k()) throw std::invalid_argument("fixed_point_solve: K0 has wrong block count");
  for (Index i = 0; i < datum.k(); ++i)
    if (out.k.block(i).dim() != datum.n[static_cast<std::size_t>(i)])
      throw std::invalid_argument("fixed_point_solve: K0 block size mismatch");

  const double min_step = std::min(settings.damping, kMinStep);
  try {
    double f = objective(datum, out.k);
    out.objective_trace.push_back(f);
    for (out.iterations = 0;; ++out.iterations) {
      const std::vector<Mat> m = fixed_point_operator(datum, out.k);
      out.residual = residual_from(datum, out.k, m).norm;
      if (out.residual <= settings.tol * (1.0 + out.k.frobenius())) {
        out.status = SolveStatus::converged;
        break;
      }
      if (out.iterations >= settings.max_iter) {
        out.status = SolveStatus::max_iter;
        break;
      }
      if (normalized_defect(datum, out.k) < kNewtonSwitch) {
        std::vector<PdMat> roots;
        const std::vector<Mat> step = newton_direction(datum, out.k, roots);
        bool accepted = false;
        for (double t = 1.0; t >= 1.0 / 1024.0 && !accepted; t /= 2.0) {
          try {
            BlockPd candidate = exp_update(roots, step, t);
            const double fc = objective(datum, candidate);
            if (fc >= f - kAscentSlack) {
              out.k = std::move(candidate);
              f = fc;
              accepted = true;
            }
          } catch (const LinalgError&) {
          } catch (const SingularPushforward&) {
          }
        }
        if (accepted) {
          ++out.newton_steps;
          out.objective_trace.push_back(f);
          continue;
        }
      }
      std::vector<Mat> target;
      for (Index i = 0; i < datum.k(); ++i) {
        const PdMat mi = checked_pd(m[static_cast<std::size_t>(i)], "M_i(K)");
        target.push_back(datum.c[static_cast<std::size_t>(i)] * mi.inverse());
      }
      double alpha = settings.damping;
      BlockPd candidate = blend(out.k, target, alpha);
      double fc = objective(datum, candidate);
      while (fc < f - kAscentSlack && alpha > min_step) {
        alpha = std::max(alpha / 2.0, min_step);
        candidate = blend(out.k, target, alpha);
        fc = objective(datum, candidate);
      }
      out.k = std::move(candidate);
      f = fc;
      out.objective_trace.push_back(f);
      if (out.k.max_condition() > kDivergenceBound || out.k.frobenius() > kDivergenceBound) {
        out.status = SolveStatus::diverged;
        ++out.iterations;
        break;
      }
    }
    out.objective = f;
  } catch (const SingularPushforward&) {
    out.status = SolveStatus::diverged;
    out.residual = std::numeric_limits<double>::infinity();
    out.objective = out.objective_trace.empty() ? std::nan("") : out.objective_trace.back();
  } catch (const LinalgError&) {
    out.status = SolveStatus::diverged;
    out.residual = std::numeric_limits<double>::infinity();
    out.objective = out.objective_trace.empty() ? std::nan("") : out.objective_trace.back();
  }
  return out;
}

const char* to_string(BestConstant::Kind kind) {
  switch (kind) {
    case BestConstant::Kind::finite: return "finite";
    case BestConstant::Kind::infinite: return "infinite";
    case BestConstant::Kind::unresolved: return "unresolved";
  }
  return "?";
}

BestConstant best_constant(const Datum& datum, const ConstantSettings& settings) {
  require_valid(datum);
  BestConstant out;
  out.scaling = scaling_check(datum);
  if (!out.scaling.holds) {
    out.kind = BestConstant::Kind::infinite;
    out.value = std::numeric_limits<double>::infinity();
    out.reason = "scaling";
    // A dimension witness, when one exists, is reported alongside.
    out.witness = dimension_check_sampled(datum, settings.trials, settings.seed).witness;
    return out;
  }
  auto dim = dimension_check_sampled(datum, settings.trials, settings.seed);
  if (dim.witness) {
    out.kind = BestConstant::Kind::infinite;
    out.value = std::numeric_limits<double>::infinity();
    out.reason = "dimension";
    out.witness = std::move(dim.witness);
    return out;
  }
  SolveResult solve = fixed_point_solve(datum, settings.solver);
  if (solve.status == SolveStatus::converged) {
    out.kind = BestConstant::Kind::finite;
    out.value = 0.5 * solve.objective;
    out.reason = "fixed point converged";
    out.certificate = solve.k;
  } else {
    out.kind = BestConstant::Kind::unresolved;
    double best = -std::numeric_limits<double>::infinity();
    for (double v : solve.objective_trace) best = std::max(best, v);
    out.value = 0.5 * best;
    out.reason = std::string("solver ") + to_string(solve.status) + "; value is a lower bound";
  }
  out.solve = std::move(solve);
  return out;
}

double normalized_defect(const Datum& datum, const BlockPd& k) {
  const std::vector<Mat> m = fixed_point_operator(datum, k);
  double worst = 0.0;
  for (Index i = 0; i < datum.k(); ++i) {
    const PdMat root = sqrtm_pd(k.block(i));
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    const Mat scaled = root.matrix() * m[static_cast<std::size_t>(i)] * root.matrix() -
                       datum.c[static_cast<std::size_t>(i)] * Mat::Identity(ni, ni);
    worst = std::max(worst, scaled.norm());
  }
  return worst;
}

Geometrization geometrize(const Datum& datum, const BlockPd& k) {
  require_valid(datum);
  if (k.size() != datum.k()) throw std::invalid_argument("geometrize: K has wrong block count");
  const double defect = normalized_defect(datum, k);
  if (!(defect <= 1e-6))
    throw PreconditionError("geometrize: K does not solve the fixed-point equation (defect " +
                            std::to_string(defect) + ")");
  Geometrization out;
  out.datum = datum;
  const Index total = datum.total_dim();
  Mat root_k = Mat::Zero(total, total);
  for (Index i = 0; i < datum.k(); ++i) {
    const Index ni = datum.n[static_cast<std::size_t>(i)];
    root_k.block(datum.offset(i), datum.offset(i), ni, ni) = sqrtm_pd(k.block(i)).matrix();
    out.c.push_back(inv_sqrtm_pd(k.block(i)));
  }
  const Mat kfull = k.assemble();
  for (Index j = 0; j < datum.m(); ++j) {
    const PdMat s = checked_pd(pushforward_cov(datum, kfull, j), "B_j K B_j^T");
    out.a.push_back(sqrtm_pd(s));
    out.datum.B[static_cast<std::size_t>(j)] =
        inv_sqrtm_pd(s).matrix() * datum.B[static_cast<std::size_t>(j)] * root_k;
  }
  return out;
}

double gaussian_gap(const Datum& datum, const BlockPd& k) {
  const double log2pie = std::log(2.0 * std::numbers::pi * std::numbers::e);
  const Mat kfull = k.assemble();
  double gap = 0.0;
  for (Index i = 0; i < datum.k(); ++i) {
    const double h = 0.5 * (static_cast<double>(datum.n[static_cast<std::size_t>(i)]) * log2pie + k.block(i).log_det());
    gap += datum.c[static_cast<std::size_t>(i)] * h;
  }
  for (Index j = 0; j < datum.m(); ++j) {
    const PdMat s = checked_pd(pushforward_cov(datum, kfull, j), "B_j K B_j^T");
    const double h = 0.5 * (static_cast<double>(datum.p[static_cast<std::size_t>(j)]) * log2pie + s.log_det());
    gap -= datum.d[static_cast<std::size_t>(j)] * h;
  }
  return gap;
}

}  // namespace entineq
