#include "fusedhs/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fusedhs/errors.hpp"

namespace fusedhs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

void require_positive(double v, const char* what, Family f) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterDomainError(std::string(family_name(f)) + ": " + what +
                               " must be positive and finite, got " + std::to_string(v));
  }
}

void require_finite(double v, const char* what, Family f) {
  if (!std::isfinite(v)) {
    throw ParameterDomainError(std::string(family_name(f)) + ": " + what + " must be finite");
  }
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Normal: return "Normal";
    case Family::Exponential: return "Exponential";
    case Family::Gamma: return "Gamma";
    case Family::InverseGamma: return "InverseGamma";
    case Family::InverseGaussian: return "InverseGaussian";
    case Family::HalfCauchy: return "HalfCauchy";
    case Family::Laplace: return "Laplace";
  }
  return "Unknown";
}

void ScalarDist::validate() const {
  switch (family) {
    case Family::Normal:
      require_finite(a, "mean", family);
      require_positive(b, "standard deviation", family);
      break;
    case Family::Exponential:
      require_positive(a, "rate", family);
      break;
    case Family::Gamma:
      require_positive(a, "shape", family);
      require_positive(b, "rate", family);
      break;
    case Family::InverseGamma:
      require_positive(a, "shape", family);
      require_positive(b, "scale", family);
      break;
    case Family::InverseGaussian:
      require_positive(a, "mean", family);
      require_positive(b, "shape", family);
      break;
    case Family::HalfCauchy:
      require_positive(a, "scale", family);
      break;
    case Family::Laplace:
      require_finite(a, "location", family);
      require_positive(b, "scale", family);
      break;
  }
}

double draw_gamma(double shape, double rate, RngStream& rng) {
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a); the power is taken in log space so
    // very small shapes do not underflow prematurely.
    const double g = draw_gamma(shape + 1.0, 1.0, rng);
    const double u = rng.uniform();
    return std::exp(std::log(g) + std::log(u) / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;  // squeeze
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double draw_inverse_gamma(double shape, double scale, RngStream& rng) {
  return 1.0 / draw_gamma(shape, scale, rng);
}

double draw_inverse_gaussian(double mean, double shape, RngStream& rng) {
  const double z = rng.normal();
  const double r = mean * z * z / (2.0 * shape);
  // Smaller root of the quadratic, written as mean / (1 + r + sqrt(r^2 + 2r))
  // so it stays accurate when r is huge (tiny |beta| gives huge means).
  const double x = mean / (1.0 + r + std::sqrt(r * r + 2.0 * r));
  const double u = rng.uniform();
  if (u * (mean + x) <= mean) return x;
  return mean * (mean / x);
}

double sample(const ScalarDist& dist, RngStream& rng) {
  dist.validate();
  switch (dist.family) {
    case Family::Normal:
      return dist.a + dist.b * rng.normal();
    case Family::Exponential:
      return -std::log(rng.uniform()) / dist.a;
    case Family::Gamma:
      return draw_gamma(dist.a, dist.b, rng);
    case Family::InverseGamma:
      return draw_inverse_gamma(dist.a, dist.b, rng);
    case Family::InverseGaussian:
      return draw_inverse_gaussian(dist.a, dist.b, rng);
    case Family::HalfCauchy:
      return dist.a * std::tan(0.5 * std::numbers::pi * rng.uniform());
    case Family::Laplace: {
      const double u = rng.uniform() - 0.5;
      const double mag = -std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? dist.a - dist.b * mag : dist.a + dist.b * mag;
    }
  }
  return 0.0;
}

double log_density(const ScalarDist& dist, double x) {
  dist.validate();
  if (std::isnan(x)) return kNegInf;
  const double a = dist.a;
  const double b = dist.b;
  switch (dist.family) {
    case Family::Normal: {
      const double z = (x - a) / b;
      return -0.5 * kLogTwoPi - std::log(b) - 0.5 * z * z;
    }
    case Family::Exponential:
      if (x < 0.0) return kNegInf;
      return std::log(a) - a * x;
    case Family::Gamma:
      if (x < 0.0) return kNegInf;
      if (x == 0.0) {
        if (a == 1.0) return std::log(b);
        return a < 1.0 ? std::numeric_limits<double>::infinity() : kNegInf;
      }
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
    case Family::InverseGamma:
      if (x <= 0.0) return kNegInf;
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
    case Family::InverseGaussian: {
      if (x <= 0.0) return kNegInf;
      const double d = x - a;
      return 0.5 * (std::log(b) - kLogTwoPi - 3.0 * std::log(x)) - b * d * d / (2.0 * a * a * x);
    }
    case Family::HalfCauchy:
      if (x < 0.0) return kNegInf;
      return std::log(2.0 * a / std::numbers::pi) - std::log(x * x + a * a);
    case Family::Laplace:
      return -std::log(2.0 * b) - std::abs(x - a) / b;
  }
  return kNegInf;
}

double gaussian_loglik_point(double y_i, std::span<const double> x_i,
                             std::span<const double> beta, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw ParameterDomainError("gaussian_loglik_point: sigma2 must be positive");
  }
  if (x_i.size() != beta.size()) {
    throw ParameterDomainError("gaussian_loglik_point: x_i and beta differ in length");
  }
  double fitted = 0.0;
  for (std::size_t j = 0; j < x_i.size(); ++j) fitted += x_i[j] * beta[j];
  const double r = y_i - fitted;
  return -0.5 * (kLogTwoPi + std::log(sigma2)) - r * r / (2.0 * sigma2);
}

}  // namespace fusedhs
