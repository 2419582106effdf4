#pragma once

#include <span>
#include <string_view>

#include "fusedhs/rng.hpp"

namespace fusedhs {

enum class Family {
  Normal,           // a = mean, b = standard deviation
  Exponential,      // a = rate
  Gamma,            // a = shape, b = rate
  InverseGamma,     // a = shape, b = scale
  InverseGaussian,  // a = mean, b = shape
  HalfCauchy,       // a = scale
  Laplace,          // a = location, b = scale
};

std::string_view family_name(Family f);

/// A scalar distribution from one of the families used by the samplers.
/// Construct through the named factories; validate() enforces positivity
/// of every scale, shape and rate.
struct ScalarDist {
  Family family;
  double a = 0.0;
  double b = 0.0;

  static ScalarDist normal(double mean, double sd) { return {Family::Normal, mean, sd}; }
  static ScalarDist exponential(double rate) { return {Family::Exponential, rate, 0.0}; }
  static ScalarDist gamma(double shape, double rate) { return {Family::Gamma, shape, rate}; }
  static ScalarDist inverse_gamma(double shape, double scale) {
    return {Family::InverseGamma, shape, scale};
  }
  static ScalarDist inverse_gaussian(double mean, double shape) {
    return {Family::InverseGaussian, mean, shape};
  }
  static ScalarDist half_cauchy(double scale) { return {Family::HalfCauchy, scale, 0.0}; }
  static ScalarDist laplace(double location, double scale) {
    return {Family::Laplace, location, scale};
  }

  /// Throws ParameterDomainError when a parameter is out of its domain.
  void validate() const;
};

double sample(const ScalarDist& dist, RngStream& rng);

/// Natural-log density; -infinity outside the support.
double log_density(const ScalarDist& dist, double x);

// Unchecked samplers used on the hot path of the Gibbs kernels. Callers
// guarantee valid parameters.

/// Gamma(shape, rate). Marsaglia-Tsang squeeze for shape >= 1; smaller
/// shapes are boosted to shape + 1 and scaled back by U^(1/shape).
double draw_gamma(double shape, double rate, RngStream& rng);

/// InverseGamma(shape, scale), density proportional to x^(-shape-1) exp(-scale/x).
double draw_inverse_gamma(double shape, double scale, RngStream& rng);

/// InverseGaussian(mean, shape) by the transformation-with-rejection method
/// (root of a chi-square(1) variate plus one uniform accept step).
double draw_inverse_gaussian(double mean, double shape, RngStream& rng);

/// Log of the Gaussian likelihood of one observation:
/// log N(y_i | x_i' beta, sigma2).
double gaussian_loglik_point(double y_i, std::span<const double> x_i,
                             std::span<const double> beta, double sigma2);

}  // namespace fusedhs
