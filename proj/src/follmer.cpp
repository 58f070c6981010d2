#include "entineq/follmer.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace entineq {

namespace {

constexpr unsigned kMaxDepth = 15;
constexpr double kRelTol = 1e-12;

template <unsigned Points>
double integrate(const PdMat& sigma, double& error) {
  auto f = [&](double t) { return follmer_integrand(sigma, t); };
  return boost::math::quadrature::gauss_kronrod<double, Points>::integrate(f, 0.0, 1.0, kMaxDepth, kRelTol, &error);
}

}  // namespace

Mat follmer_drift_matrix(const PdMat& sigma, double t) {
  const Index d = sigma.dim();
  const Mat a = sigma.matrix() - Mat::Identity(d, d);
  const Mat lift = Mat::Identity(d, d) + t * a;
  // lift and a commute, so M_t = lift^{-1} a.
  return lift.llt().solve(a);
}

double follmer_integrand(const PdMat& sigma, double t) {
  const Index d = sigma.dim();
  const Mat m = follmer_drift_matrix(sigma, t);
  const Mat cov = t * t * sigma.matrix() + t * (1.0 - t) * Mat::Identity(d, d);
  return (m * cov * m.transpose()).trace();
}

FollmerResult follmer_energy_gaussian(const PdMat& sigma, std::size_t quadrature_points) {
  FollmerResult out;
  double integral = 0.0;
  switch (quadrature_points) {
    case 15: integral = integrate<15>(sigma, out.error_estimate); break;
    case 21: integral = integrate<21>(sigma, out.error_estimate); break;
    case 31: integral = integrate<31>(sigma, out.error_estimate); break;
    case 41: integral = integrate<41>(sigma, out.error_estimate); break;
    case 51: integral = integrate<51>(sigma, out.error_estimate); break;
    case 61: integral = integrate<61>(sigma, out.error_estimate); break;
    default: throw std::invalid_argument("quadrature points must be one of 15, 21, 31, 41, 51, 61");
  }
  if (!std::isfinite(integral) || out.error_estimate > 1e-8 * std::max(1.0, std::abs(integral)))
    throw QuadratureError("drift-energy quadrature did not converge (error estimate " +
                          std::to_string(out.error_estimate) + ")");
  out.energy = 0.5 * integral;
  out.relative_entropy =
      0.5 * (sigma.matrix().trace() - static_cast<double>(sigma.dim()) - sigma.log_det());
  out.difference = std::abs(out.energy - out.relative_entropy);
  return out;
}

}  // namespace entineq
