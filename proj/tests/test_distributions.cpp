#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "fusedhs/distributions.hpp"
#include "fusedhs/errors.hpp"
#include "oracles.hpp"

using namespace fusedhs;

namespace {

struct Moments {
  double mean, var, se_mean, se_var;
};

Moments empirical(const ScalarDist& d, std::size_t count, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> x(count);
  double m = 0.0;
  for (auto& v : x) {
    v = sample(d, rng);
    m += v;
  }
  const auto n = static_cast<double>(count);
  m /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double e = (v - m) * (v - m);
    m2 += e;
    m4 += e * e;
  }
  m2 /= n;
  m4 /= n;
  return {m, m2 * n / (n - 1.0), std::sqrt(m2 / n), std::sqrt((m4 - m2 * m2) / n)};
}

void check_moments(const ScalarDist& d, double mean, double var, double k) {
  const auto e = empirical(d, 1000000, 99);
  INFO(family_name(d.family) << "(" << d.a << ", " << d.b << "): mean " << e.mean << " var "
                             << e.var);
  CHECK(std::abs(e.mean - mean) < k * e.se_mean);
  CHECK(std::abs(e.var - var) < k * e.se_var);
}

}  // namespace

TEST_CASE("Gamma(1, 10) has mean 0.1") {
  const auto e = empirical(ScalarDist::gamma(1.0, 10.0), 1000000, 1);
  CHECK(std::abs(e.mean - 0.1) < 3.0 * e.se_mean);
}

TEST_CASE("InverseGaussian(2, 3) has mean 2 and variance 8/3") {
  const auto e = empirical(ScalarDist::inverse_gaussian(2.0, 3.0), 1000000, 2);
  CHECK(std::abs(e.mean - 2.0) < 3.0 * e.se_mean);
  CHECK(std::abs(e.var - 8.0 / 3.0) < 3.0 * e.se_var);
}

TEST_CASE("moments of every family") {
  check_moments(ScalarDist::normal(1.0, 2.0), 1.0, 4.0, 4.0);
  check_moments(ScalarDist::exponential(3.0), 1.0 / 3.0, 1.0 / 9.0, 4.0);
  check_moments(ScalarDist::gamma(2.5, 2.0), 1.25, 0.625, 4.0);
  check_moments(ScalarDist::gamma(0.4, 1.5), 0.4 / 1.5, 0.4 / 2.25, 4.0);
  check_moments(ScalarDist::inverse_gamma(6.0, 2.0), 0.4, 4.0 / (25.0 * 4.0), 4.0);
  check_moments(ScalarDist::inverse_gaussian(0.5, 8.0), 0.5, 0.125 / 8.0, 4.0);
  check_moments(ScalarDist::laplace(1.0, 0.5), 1.0, 0.5, 4.0);
}

TEST_CASE("inverse gaussian in the extreme-ratio regime") {
  // mean/shape >> 1 is the regime of 1/tau2 draws with tiny coefficients
  check_moments(ScalarDist::inverse_gaussian(1e4, 1.0), 1e4, 1e12, 4.0);
}

TEST_CASE("exponential density at zero") {
  for (double d : {0.1, 1.0, 7.5}) {
    CHECK(std::exp(log_density(ScalarDist::exponential(d), 0.0)) == doctest::Approx(d));
    CHECK(log_density(ScalarDist::exponential(d), -1e-9) ==
          -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("half-Cauchy density at the scale") {
  CHECK(log_density(ScalarDist::half_cauchy(1.0), 1.0) ==
        doctest::Approx(std::log(1.0 / std::numbers::pi)).epsilon(1e-14));
  CHECK(log_density(ScalarDist::half_cauchy(1.0), -0.5) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("densities integrate to one") {
  const std::vector<ScalarDist> positive = {
      ScalarDist::exponential(2.0),          ScalarDist::gamma(3.0, 0.5),
      ScalarDist::gamma(0.7, 2.0),           ScalarDist::inverse_gamma(1.5, 2.0),
      ScalarDist::inverse_gaussian(2.0, 3.0), ScalarDist::half_cauchy(0.5)};
  boost::math::quadrature::exp_sinh<double> half_line;
  for (const auto& d : positive) {
    const double total = half_line.integrate(
        [&](double x) { return std::exp(log_density(d, x)); }, 0.0,
        std::numeric_limits<double>::infinity(), 1e-10);
    INFO(family_name(d.family));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
  }
  // whole line as two half lines; the Laplace kink sits on an endpoint
  for (const auto& d : {ScalarDist::normal(0.3, 1.7), ScalarDist::laplace(0.0, 0.8)}) {
    const double total = half_line.integrate(
        [&](double x) { return std::exp(log_density(d, x)) + std::exp(log_density(d, -x)); },
        0.0, std::numeric_limits<double>::infinity(), 1e-10);
    INFO(family_name(d.family));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("invalid parameters are rejected") {
  RngStream rng(3);
  CHECK_THROWS_AS(sample(ScalarDist::gamma(0.0, 1.0), rng), ParameterDomainError);
  CHECK_THROWS_AS(sample(ScalarDist::gamma(1.0, -1.0), rng), ParameterDomainError);
  CHECK_THROWS_AS(sample(ScalarDist::normal(0.0, 0.0), rng), ParameterDomainError);
  CHECK_THROWS_AS(sample(ScalarDist::inverse_gaussian(-1.0, 1.0), rng), ParameterDomainError);
  CHECK_THROWS_AS(log_density(ScalarDist::half_cauchy(0.0), 1.0), ParameterDomainError);
  CHECK_THROWS_AS(ScalarDist::exponential(std::nan("")).validate(), ParameterDomainError);
  CHECK_NOTHROW(ScalarDist::inverse_gamma(0.5, 0.5).validate());
}

TEST_CASE("Laplace scale-mixture identity") {
  CHECK(oracles::laplace_mixture_quadrature(0.7, 1.3, 2.0) ==
        doctest::Approx(oracles::laplace_density(0.7, 1.3, 2.0)).epsilon(1e-6));
  RngStream rng(11);
  for (int i = 0; i < 20; ++i) {
    const double beta = 4.0 * rng.normal();
    const double sigma2 = std::exp(3.0 * rng.uniform() - 1.5);
    const double lambda = std::exp(3.0 * rng.uniform() - 1.5);
    const double q = oracles::laplace_mixture_quadrature(beta, sigma2, lambda);
    const double ref = oracles::laplace_density(beta, sigma2, lambda);
    INFO(beta << " " << sigma2 << " " << lambda);
    CHECK(std::abs(q - ref) / ref < 1e-6);
  }
}

TEST_CASE("half-Cauchy inverse-gamma hierarchy") {
  for (double a : {0.5, 1.0, 2.0}) {
    RngStream rng(static_cast<std::uint64_t>(a * 1000));
    const auto draws = oracles::half_cauchy_hierarchy(a, 100000, rng);
    const double d = oracles::half_cauchy_ks(draws, a);
    INFO("A = " << a << ", D = " << d);
    CHECK(d < oracles::ks_critical_1pct(draws.size()));
  }
}

TEST_CASE("direct half-Cauchy sampler matches its CDF") {
  RngStream rng(5);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample(ScalarDist::half_cauchy(2.0), rng);
  CHECK(oracles::half_cauchy_ks(x, 2.0) < oracles::ks_critical_1pct(x.size()));
}

TEST_CASE("gaussian point log-likelihood") {
  const std::vector<double> x = {1.0, -2.0, 0.5};
  const std::vector<double> beta = {0.3, 0.1, 2.0};
  const double fit = 0.3 - 0.2 + 1.0;
  CHECK(gaussian_loglik_point(fit, x, beta, 1.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(gaussian_loglik_point(fit + 2.0, x, beta, 4.0) ==
        doctest::Approx(-0.5 * std::log(8.0 * std::numbers::pi) - 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(gaussian_loglik_point(0.0, x, beta, 0.0), ParameterDomainError);
  CHECK_THROWS_AS(gaussian_loglik_point(0.0, x, beta, -1.0), ParameterDomainError);

  // sum over five points equals the log of the product of the densities
  const double sigma2 = 0.7;
  const std::vector<std::vector<double>> rows = {
      {1.0, 0.0, 0.2}, {0.5, 1.5, -1.0}, {-1.0, 2.0, 0.0}, {0.0, 0.0, 1.0}, {3.0, -1.0, 0.4}};
  const std::vector<double> y = {0.1, -0.4, 2.2, 1.9, 0.0};
  double sum = 0.0, product = 1.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sum += gaussian_loglik_point(y[i], rows[i], beta, sigma2);
    double mu = 0.0;
    for (std::size_t j = 0; j < 3; ++j) mu += rows[i][j] * beta[j];
    product *= std::exp(-(y[i] - mu) * (y[i] - mu) / (2.0 * sigma2)) /
               std::sqrt(2.0 * std::numbers::pi * sigma2);
  }
  CHECK(std::abs(sum - std::log(product)) < 1e-12);
}

TEST_CASE("same seed gives the same draws") {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = draw_gamma(0.3, 1.0, a);
    CHECK(u == draw_gamma(0.3, 1.0, b));
    differs |= u != draw_gamma(0.3, 1.0, c);
  }
  CHECK(differs);
}

TEST_CASE("derived streams do not depend on derivation order") {
  RngStream root(7);
  auto a1 = root.derive(1);
  auto a2 = root.derive(2);
  RngStream root2(7);
  auto b2 = root2.derive(2);
  auto b1 = root2.derive(1);
  for (int i = 0; i < 10; ++i) {
    CHECK(a1.next_u64() == b1.next_u64());
    CHECK(a2.next_u64() == b2.next_u64());
  }
  CHECK(root.derive(1, 2).seed() != root.derive(2, 1).seed());
}

TEST_CASE("uniforms stay inside the open interval") {
  RngStream rng(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}
