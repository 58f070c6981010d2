#include "entineq/mixture.hpp"

#include "entineq/gaussopt.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace entineq {

GaussianMixture::GaussianMixture(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture needs at least one component");
  const Index d = components_.front().mean.size();
  if (d < 1) throw std::invalid_argument("mixture dimension must be positive");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    if (c.mean.size() != d || c.cov.dim() != d) throw std::invalid_argument("mixture component dimension mismatch");
    if (!c.mean.allFinite()) throw std::invalid_argument("mixture mean is not finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  for (const auto& c : components_) {
    chol_.emplace_back(c.cov.matrix());
    log_norm_.push_back(std::log(c.weight) - static_cast<double>(d) * half_log_2pi - 0.5 * c.cov.log_det());
  }
}

GaussianMixture GaussianMixture::gaussian(const Vec& mean, const PdMat& cov) {
  return GaussianMixture({Component{1.0, mean, cov}});
}

GaussianMixture GaussianMixture::standard(Index dim) { return gaussian(Vec::Zero(dim), PdMat::identity(dim)); }

double GaussianMixture::log_density(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(components_.size());
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const Vec z = chol_[c].matrixL().solve(x - components_[c].mean);
    terms[c] = log_norm_[c] - 0.5 * z.squaredNorm();
    best = std::max(best, terms[c]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

Vec GaussianMixture::sample(Rng& rng) const {
  std::size_t pick = 0;
  if (components_.size() > 1) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    while (pick + 1 < components_.size() && u >= components_[pick].weight) u -= components_[pick++].weight;
  }
  std::normal_distribution<double> normal;
  Vec z(dim());
  for (Index r = 0; r < z.size(); ++r) z(r) = normal(rng);
  return components_[pick].mean + chol_[pick].matrixL() * z;
}

Vec GaussianMixture::mean() const {
  Vec mu = Vec::Zero(dim());
  for (const auto& c : components_) mu += c.weight * c.mean;
  return mu;
}

Mat GaussianMixture::covariance() const {
  const Vec mu = mean();
  Mat cov = Mat::Zero(dim(), dim());
  for (const auto& c : components_) {
    const Vec dm = c.mean - mu;
    cov += c.weight * (c.cov.matrix() + dm * dm.transpose());
  }
  return cov;
}

GaussianMixture GaussianMixture::translated(const Vec& shift) const {
  std::vector<Component> out = components_;
  for (auto& c : out) c.mean += shift;
  return GaussianMixture(std::move(out));
}

ProductDistribution ProductDistribution::gaussian(const BlockPd& k) {
  ProductDistribution out;
  for (const auto& b : k.blocks()) out.factors.push_back(GaussianMixture::gaussian(Vec::Zero(b.dim()), b));
  return out;
}

void ProductDistribution::check_conforms(const Datum& datum) const {
  if (static_cast<Index>(factors.size()) != datum.k())
    throw std::invalid_argument("distribution has " + std::to_string(factors.size()) + " factors, datum has " +
                                std::to_string(datum.k()));
  for (Index i = 0; i < datum.k(); ++i)
    if (factors[static_cast<std::size_t>(i)].dim() != datum.n[static_cast<std::size_t>(i)])
      throw std::invalid_argument("factor " + std::to_string(i) + " has the wrong dimension");
}

Index ProductDistribution::total_dim() const {
  Index n = 0;
  for (const auto& f : factors) n += f.dim();
  return n;
}

bool ProductDistribution::all_gaussian() const {
  return std::all_of(factors.begin(), factors.end(), [](const GaussianMixture& f) { return f.is_gaussian(); });
}

std::size_t ProductDistribution::component_count() const {
  std::size_t count = 1;
  for (const auto& f : factors) {
    if (count > std::numeric_limits<std::size_t>::max() / f.size()) return std::numeric_limits<std::size_t>::max();
    count *= f.size();
  }
  return count;
}

Vec ProductDistribution::sample(Rng& rng) const {
  Vec x(total_dim());
  Index off = 0;
  for (const auto& f : factors) {
    x.segment(off, f.dim()) = f.sample(rng);
    off += f.dim();
  }
  return x;
}

Mat ProductDistribution::covariance() const {
  const Index n = total_dim();
  Mat cov = Mat::Zero(n, n);
  Index off = 0;
  for (const auto& f : factors) {
    cov.block(off, off, f.dim(), f.dim()) = f.covariance();
    off += f.dim();
  }
  return cov;
}

GaussianMixture linear_image(const Mat& m, const ProductDistribution& dist) {
  if (m.cols() != dist.total_dim()) throw std::invalid_argument("linear_image: shape mismatch");
  const std::size_t count = dist.component_count();
  if (count > kMaxComponents)
    throw ComponentCapExceeded("pushforward would have " + std::to_string(count) + " components (cap " +
                               std::to_string(kMaxComponents) + ")");
  std::vector<Mat> cols;
  std::vector<Index> offsets;
  Index off = 0;
  for (const auto& f : dist.factors) {
    cols.push_back(m.middleCols(off, f.dim()));
    offsets.push_back(off);
    off += f.dim();
  }
  std::vector<Component> out;
  out.reserve(count);
  double total = 0.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    double w = 1.0;
    Vec mu = Vec::Zero(m.rows());
    Mat cov = Mat::Zero(m.rows(), m.rows());
    for (std::size_t i = 0; i < dist.factors.size(); ++i) {
      const auto& comps = dist.factors[i].components();
      const Component& c = comps[rest % comps.size()];
      rest /= comps.size();
      w *= c.weight;
      mu += cols[i] * c.mean;
      cov += cols[i] * c.cov.matrix() * cols[i].transpose();
    }
    try {
      out.push_back(Component{w, std::move(mu), PdMat(Mat(0.5 * (cov + cov.transpose())))});
    } catch (const LinalgError&) {
      throw SingularPushforward("image covariance is numerically singular");
    }
    total += w;
  }
  for (auto& c : out) c.weight /= total;
  return GaussianMixture(std::move(out));
}

GaussianMixture pushforward(const Datum& datum, const ProductDistribution& dist, Index j) {
  dist.check_conforms(datum);
  return linear_image(datum.B[static_cast<std::size_t>(j)], dist);
}

GaussianMixture convolve(const GaussianMixture& a, const GaussianMixture& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("convolve: dimension mismatch");
  if (a.size() * b.size() > kMaxComponents) throw ComponentCapExceeded("convolution exceeds the component cap");
  std::vector<Component> out;
  for (const auto& x : a.components())
    for (const auto& y : b.components())
      out.push_back(Component{x.weight * y.weight, x.mean + y.mean, PdMat(Mat(x.cov.matrix() + y.cov.matrix()))});
  double total = 0.0;
  for (const auto& c : out) total += c.weight;
  for (auto& c : out) c.weight /= total;
  return GaussianMixture(std::move(out));
}

ProductDistribution convolve(const ProductDistribution& a, const ProductDistribution& b) {
  if (a.factors.size() != b.factors.size()) throw std::invalid_argument("convolve: factor count mismatch");
  ProductDistribution out;
  for (std::size_t i = 0; i < a.factors.size(); ++i) out.factors.push_back(convolve(a.factors[i], b.factors[i]));
  return out;
}

}  // namespace entineq
