#pragma once

// Gaussian mixtures, independent products of them, and their linear images.

#include "entineq/datum.hpp"
#include "entineq/random.hpp"

#include <vector>

namespace entineq {

struct Component {
  double weight = 1.0;
  Vec mean;
  PdMat cov;
};

class GaussianMixture {
 public:
  /// Weights must be positive and sum to 1 within 1e-12; dims must agree.
  explicit GaussianMixture(std::vector<Component> components);
  static GaussianMixture gaussian(const Vec& mean, const PdMat& cov);
  static GaussianMixture standard(Index dim);

  Index dim() const { return components_.front().mean.size(); }
  const std::vector<Component>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  bool is_gaussian() const { return components_.size() == 1; }

  double log_density(const Vec& x) const;
  Vec sample(Rng& rng) const;
  Vec mean() const;
  Mat covariance() const;
  GaussianMixture translated(const Vec& shift) const;

 private:
  std::vector<Component> components_;
  std::vector<Eigen::LLT<Mat>> chol_;
  std::vector<double> log_norm_;  // log w - (d/2) log(2 pi) - (1/2) log det
};

class ComponentCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kMaxComponents = 100000;

/// Independent factors X = (X_1, ..., X_k).
struct ProductDistribution {
  std::vector<GaussianMixture> factors;

  static ProductDistribution gaussian(const BlockPd& k);
  void check_conforms(const Datum& datum) const;
  Index total_dim() const;
  bool all_gaussian() const;
  std::size_t component_count() const;  // product of factor sizes (saturating)
  Vec sample(Rng& rng) const;
  Mat covariance() const;
};

/// Law of m X for a product X; component tuples are enumerated. Throws
/// ComponentCapExceeded above kMaxComponents and SingularPushforward when an
/// image covariance is singular.
GaussianMixture linear_image(const Mat& m, const ProductDistribution& dist);
GaussianMixture pushforward(const Datum& datum, const ProductDistribution& dist, Index j);

/// Law of X + Y for independent mixtures.
GaussianMixture convolve(const GaussianMixture& a, const GaussianMixture& b);
ProductDistribution convolve(const ProductDistribution& a, const ProductDistribution& b);

}  // namespace entineq
