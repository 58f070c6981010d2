#include "entineq/entropy.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>

namespace entineq {

double entropy_gaussian(const PdMat& sigma) {
  const double log2pie = std::log(2.0 * std::numbers::pi * std::numbers::e);
  return 0.5 * (static_cast<double>(sigma.dim()) * log2pie + sigma.log_det());
}

BatchPlan make_batch_plan(const McSettings& settings) {
  if (settings.samples < 1000) throw std::invalid_argument("Monte Carlo needs at least 1000 samples");
  if (settings.batches < 2 || settings.batches > settings.samples)
    throw std::invalid_argument("Monte Carlo needs between 2 and `samples` batches");
  return BatchPlan{settings.batches, settings.samples};
}

McEstimate combine_batches(const BatchPlan& plan, const std::vector<double>& batch_means) {
  double mean = 0.0;
  for (std::size_t b = 0; b < plan.batches; ++b)
    mean += static_cast<double>(plan.size(b)) * batch_means[b];
  mean /= static_cast<double>(plan.samples);
  double ss = 0.0;
  for (double m : batch_means) ss += (m - mean) * (m - mean);
  const double nb = static_cast<double>(plan.batches);
  return McEstimate{mean, std::sqrt(ss / (nb * (nb - 1.0)))};
}

double mixture_entropy_batch(const GaussianMixture& mix, const BatchPlan& plan, std::uint64_t seed, std::size_t b) {
  Rng rng = make_rng(seed, Stream::mixture_entropy, b);
  double acc = 0.0;
  const std::size_t count = plan.size(b);
  for (std::size_t s = 0; s < count; ++s) acc -= mix.log_density(mix.sample(rng));
  return acc / static_cast<double>(count);
}

McEstimate entropy_mixture_mc(const GaussianMixture& mix, const McSettings& settings) {
  const BatchPlan plan = make_batch_plan(settings);
  std::vector<double> means(plan.batches);
  const auto nb = static_cast<std::int64_t>(plan.batches);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < nb; ++b)
    means[static_cast<std::size_t>(b)] = mixture_entropy_batch(mix, plan, settings.seed, static_cast<std::size_t>(b));
  return combine_batches(plan, means);
}

DeficitModel make_deficit_model(const Datum& datum, const ProductDistribution& dist, double cg) {
  require_valid(datum);
  dist.check_conforms(datum);
  DeficitModel model;
  model.datum = &datum;
  model.dist = dist;
  model.cg = cg;
  for (Index j = 0; j < datum.m(); ++j) model.images.push_back(pushforward(datum, dist, j));
  return model;
}

double deficit_closed_form(const DeficitModel& model) {
  const Datum& datum = *model.datum;
  double value = model.cg;
  for (Index j = 0; j < datum.m(); ++j)
    value += datum.d[static_cast<std::size_t>(j)] *
             entropy_gaussian(model.images[static_cast<std::size_t>(j)].components().front().cov);
  for (Index i = 0; i < datum.k(); ++i)
    value -= datum.c[static_cast<std::size_t>(i)] *
             entropy_gaussian(model.dist.factors[static_cast<std::size_t>(i)].components().front().cov);
  return value;
}

double deficit_batch(const DeficitModel& model, const BatchPlan& plan, std::uint64_t seed, std::size_t b) {
  const Datum& datum = *model.datum;
  Rng rng = make_rng(seed, Stream::deficit, b);
  const std::size_t count = plan.size(b);
  double acc = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const Vec x = model.dist.sample(rng);
    double v = model.cg;
    for (Index j = 0; j < datum.m(); ++j)
      v -= datum.d[static_cast<std::size_t>(j)] *
           model.images[static_cast<std::size_t>(j)].log_density(datum.B[static_cast<std::size_t>(j)] * x);
    for (Index i = 0; i < datum.k(); ++i)
      v += datum.c[static_cast<std::size_t>(i)] *
           model.dist.factors[static_cast<std::size_t>(i)].log_density(
               x.segment(datum.offset(i), datum.n[static_cast<std::size_t>(i)]));
    acc += v;
  }
  return acc / static_cast<double>(count);
}

DeficitEstimate entropy_deficit(const Datum& datum, const ProductDistribution& dist, double cg,
                            const McSettings& settings) {
  const DeficitModel model = make_deficit_model(datum, dist, cg);
  if (dist.all_gaussian()) return DeficitEstimate{deficit_closed_form(model), 0.0, true};
  const BatchPlan plan = make_batch_plan(settings);
  std::vector<double> means(plan.batches);
  const auto nb = static_cast<std::int64_t>(plan.batches);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < nb; ++b)
    means[static_cast<std::size_t>(b)] = deficit_batch(model, plan, settings.seed, static_cast<std::size_t>(b));
  const McEstimate est = combine_batches(plan, means);
  return DeficitEstimate{est.value, est.se, false};
}

bool within_noise(const DeficitEstimate& d) {
  return std::abs(d.value) <= (d.exact ? 1e-9 : 3.0 * d.se);
}

const char* to_string(ClosureReport::Status s) {
  switch (s) {
    case ClosureReport::Status::passed: return "passed";
    case ClosureReport::Status::failed: return "failed";
    case ClosureReport::Status::precondition_unmet: return "precondition unmet";
  }
  return "?";
}

ClosureReport convolution_closure_test(const Datum& datum, const ProductDistribution& first,
                                       const ProductDistribution& second, double cg, const McSettings& settings) {
  ClosureReport out;
  out.first = entropy_deficit(datum, first, cg, settings);
  out.second = entropy_deficit(datum, second, cg, settings);
  if (!within_noise(out.first) || !within_noise(out.second)) {
    out.status = ClosureReport::Status::precondition_unmet;
    return out;
  }
  out.sum = entropy_deficit(datum, convolve(first, second), cg, settings);
  out.status = within_noise(out.sum) ? ClosureReport::Status::passed : ClosureReport::Status::failed;
  return out;
}

}  // namespace entineq
