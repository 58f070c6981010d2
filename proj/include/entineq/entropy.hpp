#pragma once

// Differential entropies (closed form and Monte Carlo), the entropy deficit
// C_g + sum_j d_j h(B_j X) - sum_i c_i h(X_i) on concrete product
// distributions, and the convolution closure check.

#include "entineq/mixture.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace entineq {

/// h(N(mu, sigma)) = (1/2) log((2 pi e)^dim det sigma).
double entropy_gaussian(const PdMat& sigma);

struct McSettings {
  std::size_t samples = 200000;
  std::size_t batches = 20;
  std::uint64_t seed = 0;
};

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// Monte Carlo estimate of -E log p(X), standard error from batch means.
McEstimate entropy_mixture_mc(const GaussianMixture& mix, const McSettings& settings);

struct DeficitEstimate {
  double value = 0.0;
  double se = 0.0;
  bool exact = false;  // closed form (all factors Gaussian)
};

DeficitEstimate entropy_deficit(const Datum& datum, const ProductDistribution& dist, double cg,
                            const McSettings& settings);

struct ClosureReport {
  enum class Status { passed, failed, precondition_unmet };
  Status status = Status::failed;
  DeficitEstimate first, second, sum;
};
const char* to_string(ClosureReport::Status s);

/// Both inputs must be near-extremal; then reports the deficit of the
/// factor-wise independent sum.
ClosureReport convolution_closure_test(const Datum& datum, const ProductDistribution& first,
                                       const ProductDistribution& second, double cg, const McSettings& settings);

/// |value| <= 3 se, or <= 1e-9 for exact values.
bool within_noise(const DeficitEstimate& d);

// Batch kernels shared by the parallel drivers above and the serial
// reference implementations.

struct BatchPlan {
  std::size_t batches = 0;
  std::size_t samples = 0;
  std::size_t size(std::size_t b) const { return samples / batches + (b < samples % batches ? 1 : 0); }
};
BatchPlan make_batch_plan(const McSettings& settings);
McEstimate combine_batches(const BatchPlan& plan, const std::vector<double>& batch_means);

double mixture_entropy_batch(const GaussianMixture& mix, const BatchPlan& plan, std::uint64_t seed, std::size_t b);

struct DeficitModel {
  const Datum* datum = nullptr;
  ProductDistribution dist;
  std::vector<GaussianMixture> images;
  double cg = 0.0;
};
DeficitModel make_deficit_model(const Datum& datum, const ProductDistribution& dist, double cg);
/// Deficit closed form for all-Gaussian inputs.
double deficit_closed_form(const DeficitModel& model);
double deficit_batch(const DeficitModel& model, const BatchPlan& plan, std::uint64_t seed, std::size_t b);

}  // namespace entineq
