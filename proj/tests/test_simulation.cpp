#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fusedhs/errors.hpp"
#include "fusedhs/simulation.hpp"

using namespace fusedhs;
using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

TEST_CASE("case 1 true coefficients") {
  const auto spec = make_case(1, 0.5, 50, 1);
  REQUIRE(spec.p() == 20);
  for (Eigen::Index j = 0; j < 20; ++j) {
    const double expected = (j / 5) % 2 == 1 ? 1.0 : 0.0;
    CHECK(spec.beta_star(j) == expected);
  }
  CHECK(spec.covariance == CovarianceKind::Compound);
  CHECK(make_case(1, 0.5, 50, 2).beta_star(7) == 2.0);
}

TEST_CASE("case 3 and 4 true coefficients") {
  const auto spec = make_case(4, 1.5, 50);
  REQUIRE(spec.p() == 50);
  CHECK(spec.covariance == CovarianceKind::Autoregressive);
  CHECK(spec.beta_star(0) == 3.0);
  CHECK(spec.beta_star(5) == -1.5);
  CHECK(spec.beta_star(10) == 1.0);
  CHECK(spec.beta_star(19) == 2.0);
  CHECK(spec.beta_star.tail(30).cwiseAbs().maxCoeff() == 0.0);
  CHECK(make_case(3, 0.5, 30, 1, 30).p() == 30);
  CHECK_THROWS_AS(make_case(3, 0.5, 30, 1, 10), ConfigError);
  CHECK_THROWS_AS(make_case(5, 0.5, 30), ConfigError);
  CHECK_THROWS_AS(make_case(1, -0.5, 30), ConfigError);
  CHECK_THROWS_AS(make_case(1, 0.5, 30, 3), ConfigError);
}

TEST_CASE("covariance matrices") {
  const Matrix ar = covariance_matrix(make_case(2, 0.5, 50));
  CHECK(ar(0, 2) == doctest::Approx(0.25));
  CHECK(ar(2, 0) == doctest::Approx(0.25));
  CHECK(ar(4, 4) == 1.0);
  const Matrix cs = covariance_matrix(make_case(1, 0.5, 50));
  CHECK(cs(0, 19) == 0.5);
  CHECK(cs(3, 3) == 1.0);
}

TEST_CASE("generated rows have covariance Sigma") {
  auto spec = make_case(2, 0.5, 100000);
  const Dataset ds = generate_case(spec, 0, RngStream(1));
  const Matrix sigma = covariance_matrix(spec);
  const auto n = static_cast<double>(ds.n());
  const Matrix centered = ds.X.rowwise() - ds.X.colwise().mean();
  const Matrix cov = centered.transpose() * centered / (n - 1.0);
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      const double se =
          std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
      INFO(i << "," << j);
      CHECK(std::abs(cov(i, j) - sigma(i, j)) < 4.0 * se);
    }
  }
  // residuals carry the error scale
  const Vector resid = ds.y - ds.X * spec.beta_star;
  CHECK(std::abs(std::sqrt(resid.squaredNorm() / n) - 0.5) < 0.01);
}

TEST_CASE("generation is deterministic per replicate") {
  const auto spec = make_case(1, 1.5, 30);
  const RngStream rng(5);
  const Dataset a = generate_case(spec, 3, rng);
  const Dataset b = generate_case(spec, 3, rng);
  const Dataset c = generate_case(spec, 4, rng);
  CHECK((a.X.array() == b.X.array()).all());
  CHECK((a.y.array() == b.y.array()).all());
  CHECK_FALSE((a.y.array() == c.y.array()).all());
  CHECK(a.n() == 30);
  CHECK(a.p() == 20);
}

TEST_CASE("mse") {
  const Vector star = Vector::LinSpaced(4, 0.0, 3.0);
  CHECK(mse({star, star}, star).mean == 0.0);
  Vector b(2);
  b << 1.0, 2.0;
  CHECK(mse({b}, Vector::Zero(2)).mean == 5.0);
  CHECK(mse({b}, Vector::Zero(2)).sd == 0.0);
  Vector e1(2), e3(2);
  e1 << 1.0, 0.0;
  e3 << 0.0, std::sqrt(3.0);
  const auto two = mse({e1, e3}, Vector::Zero(2));
  CHECK(two.mean == doctest::Approx(2.0));
  CHECK(two.sd == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(mse({b}, Vector::Zero(3)), ConfigError);
  CHECK_THROWS_AS(mse({}, Vector::Zero(3)), ConfigError);
}

TEST_CASE("non-zero difference pairs") {
  CHECK(nonzero_difference_pairs(make_case(1, 0.5, 50).beta_star) == Pairs{{5, 6}, {10, 11}, {15, 16}});
  CHECK(nonzero_difference_pairs(make_case(3, 0.5, 50).beta_star) ==
        Pairs{{5, 6}, {10, 11}, {15, 16}, {20, 21}});
  CHECK(nonzero_difference_pairs(Vector::Ones(6)).empty());
}

TEST_CASE("difference pairs match a brute-force scan") {
  RngStream rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto p = static_cast<Eigen::Index>(2 + rng.next_u64() % 40);
    Vector b = Vector::Zero(p);
    for (auto& v : b) {
      if (rng.uniform() < 0.3) v = std::round(4.0 * rng.normal());
    }
    std::set<std::pair<std::size_t, std::size_t>> brute;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j == i + 1 && b(i) != b(j)) {
          brute.insert({static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1)});
        }
      }
    }
    const auto got = nonzero_difference_pairs(b);
    CHECK(Pairs(brute.begin(), brute.end()) == got);
  }
}

TEST_CASE("mse_diff") {
  const Vector star = make_case(1, 0.5, 50).beta_star;
  CHECK(mse_diff({star}, star).mean == 0.0);
  Vector hat = star;
  hat(5) += 0.5;  // moves differences (5,6) and (6,7); only the first counts
  CHECK(mse_diff({hat}, star).mean == doctest::Approx(0.25));
  std::vector<std::string> warnings;
  const auto flat = mse_diff({Vector::Ones(5)}, Vector::Zero(5), &warnings);
  CHECK(flat.mean == 0.0);
  CHECK(warnings.size() == 1);
}

TEST_CASE("pse") {
  Vector err(2);
  err << 1.0, 1.0;
  Matrix cs(2, 2);
  cs << 1.0, 0.5, 0.5, 1.0;
  CHECK(pse({err}, Vector::Zero(2), cs).mean == doctest::Approx(3.0));

  RngStream rng(2);
  std::vector<Vector> hats;
  const Vector star = Vector::LinSpaced(6, -1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    Vector h(6);
    for (auto& v : h) v = rng.normal();
    hats.push_back(h);
  }
  const auto a = pse(hats, star, Matrix::Identity(6, 6));
  const auto b = mse(hats, star);
  CHECK(a.mean == b.mean);
  CHECK(a.sd == b.sd);
  CHECK(pse({star}, star, covariance_matrix(make_case(1, 0.5, 10)).topLeftCorner(6, 6)).mean == 0.0);
}

TEST_CASE("metrics are invariant under a joint coordinate permutation") {
  RngStream rng(3);
  const Eigen::Index p = 7;
  const Matrix sigma = covariance_matrix(make_case(2, 0.5, 10)).topLeftCorner(p, p);
  Vector star(p);
  for (auto& v : star) v = rng.normal();
  std::vector<Vector> hats(4, Vector(p));
  for (auto& h : hats) {
    for (auto& v : h) v = rng.normal();
  }
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(p);
  perm.indices() << 3, 0, 6, 1, 5, 2, 4;
  std::vector<Vector> ph;
  for (const auto& h : hats) ph.push_back(perm * h);
  const Matrix ps = perm * sigma * perm.transpose();
  CHECK(mse(ph, perm * star).mean == doctest::Approx(mse(hats, star).mean).epsilon(1e-14));
  CHECK(pse(ph, perm * star, ps).mean == doctest::Approx(pse(hats, star, sigma).mean).epsilon(1e-14));
}

TEST_CASE("benchmark with one case, one method, one replicate") {
  auto spec = make_case(1, 0.5, 30, 1, 50, 1);
  SamplerConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 100;
  const auto report = run_benchmark({spec}, {ModelKind::FusedHorseshoe}, cfg, RngStream(1));
  REQUIRE(report.rows.size() == 1);
  const auto& row = report.rows[0];
  CHECK(row.method == "bfh");
  CHECK(row.replications_ok == 1);
  CHECK(row.replications_failed == 0);
  CHECK(row.mse.mean > 0.0);
  CHECK(row.mse.sd == 0.0);
  CHECK(row.pse.mean > 0.0);
  CHECK(row.mse_diff.mean >= 0.0);

  const std::string csv = metrics_csv(report);
  CHECK(csv.rfind("case,method,reps_ok,reps_failed,mse,mse_sd,mse_diff,mse_diff_sd,pse,pse_sd\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("benchmark is reproducible and thread-count independent") {
  auto spec = make_case(2, 1.5, 25, 2, 50, 3);
  SamplerConfig cfg;
  cfg.iterations = 200;
  cfg.burn_in = 50;
  BenchmarkOptions serial, parallel;
  parallel.threads = 4;
  const std::vector<ModelKind> methods = {ModelKind::BayesianFusedLasso, ModelKind::FusedHorseshoe};
  const auto a = metrics_csv(run_benchmark({spec}, methods, cfg, RngStream(9), serial));
  const auto b = metrics_csv(run_benchmark({spec}, methods, cfg, RngStream(9), parallel));
  CHECK(a == b);
}
