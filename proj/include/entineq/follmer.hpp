#pragma once

// Drift-energy identity D(mu || gamma) = (1/2) int_0^1 E|u_t(X_t)|^2 dt for a
// centered Gaussian target mu = N(0, sigma). The drift is linear,
// u_t(x) = M_t x with M_t = (sigma - I)(I + t (sigma - I))^{-1}, and the
// bridge X_t = t X_1 + sqrt(t (1 - t)) Z has covariance t^2 sigma + t (1 - t) I.

#include "entineq/linops.hpp"

#include <cstddef>

namespace entineq {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Mat follmer_drift_matrix(const PdMat& sigma, double t);

/// E|u_t(X_t)|^2 = Tr(M_t Cov(X_t) M_t^T).
double follmer_integrand(const PdMat& sigma, double t);

struct FollmerResult {
  double energy = 0.0;
  double relative_entropy = 0.0;  // (1/2)(tr sigma - dim - log det sigma)
  double difference = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod quadrature with the given rule size
/// (15, 21, 31, 41, 51 or 61 points).
FollmerResult follmer_energy_gaussian(const PdMat& sigma, std::size_t quadrature_points = 61);

}  // namespace entineq
