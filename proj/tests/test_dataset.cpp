#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fusedhs/dataset.hpp"
#include "fusedhs/errors.hpp"
#include "fusedhs/rng.hpp"

using namespace fusedhs;
namespace fs = std::filesystem;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "test.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

Dataset random_dataset(std::size_t n, std::size_t p, std::uint64_t seed) {
  RngStream rng(seed);
  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (auto& v : ds.X.reshaped()) v = 5.0 + 3.0 * rng.normal();
  ds.y.resize(static_cast<Eigen::Index>(n));
  for (auto& v : ds.y) v = 10.0 + rng.normal();
  for (std::size_t j = 0; j < p; ++j) ds.column_names.push_back("c" + std::to_string(j));
  return ds;
}

}  // namespace

TEST_CASE("soil-shaped csv") {
  std::ostringstream text;
  text << "y";
  for (int j = 1; j <= 15; ++j) text << ",s" << j;
  text << "\n";
  for (int i = 0; i < 20; ++i) {
    text << 0.1 * i;
    for (int j = 1; j <= 15; ++j) text << "," << i * j % 7 + 0.5 * j;
    text << "\n";
  }
  const Dataset ds = parse(text.str());
  CHECK(ds.n() == 20);
  CHECK(ds.p() == 15);
  CHECK(ds.column_names.front() == "s1");
  CHECK(ds.column_names.back() == "s15");
  CHECK(ds.X(3, 1) == 3 * 2 % 7 + 1.0);
}

TEST_CASE("minimal csv with the response in any column") {
  const Dataset ds = parse("x,y\n1,2\n3,4\n");
  CHECK(ds.n() == 2);
  CHECK(ds.p() == 1);
  CHECK(ds.y(1) == 4.0);
  CHECK(ds.X(1, 0) == 3.0);
  CHECK(parse("x,y\r\n1,2\r\n3,4\r\n\r\n").n() == 2);
}

TEST_CASE("csv errors") {
  const auto na = error_of("y,a,b\n1,2,3\n4,NA,6\n");
  CHECK(na.find("row 2") != std::string::npos);
  CHECK(na.find("'a'") != std::string::npos);
  CHECK(na.find("NA") != std::string::npos);
  CHECK(error_of("a,b\n1,2\n3,4\n").find("'y'") != std::string::npos);
  CHECK(error_of("y,a\n1,2\n3\n").find("row 2") != std::string::npos);
  CHECK(!error_of("y,a\n1,2\n").empty());
  CHECK(!error_of("").empty());
  CHECK(!error_of("y,a\n1,2x\n3,4\n").empty());
  CHECK_THROWS_AS(load_csv("/nonexistent/data.csv"), DataError);
}

TEST_CASE("standardize a column by hand") {
  Dataset ds;
  ds.X.resize(3, 1);
  ds.X << 1, 2, 3;
  ds.y.resize(3);
  ds.y << 4, 5, 9;
  ds.column_names = {"x"};
  const auto sd = standardize(ds);
  CHECK(sd.X(0, 0) == doctest::Approx(-std::sqrt(1.5)));
  CHECK(sd.X(1, 0) == doctest::Approx(0.0));
  CHECK(sd.X(2, 0) == doctest::Approx(std::sqrt(1.5)));
  CHECK(sd.y_mean == 6.0);
  CHECK(sd.y(0) == -2.0);
  CHECK(sd.col_means(0) == 2.0);
  CHECK(sd.col_scales(0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("standardized data satisfy the centering and scaling constraints") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sd = standardize(random_dataset(5 + seed, 4, seed));
    const auto n = static_cast<double>(sd.n());
    CHECK(std::abs(sd.y.sum()) < 1e-10 * n);
    for (Eigen::Index j = 0; j < sd.X.cols(); ++j) {
      CHECK(std::abs(sd.X.col(j).sum()) < 1e-10 * n);
      CHECK(std::abs(sd.X.col(j).squaredNorm() - n) < 1e-10 * n);
    }
  }
}

TEST_CASE("standardize is idempotent") {
  const auto once = standardize(random_dataset(12, 3, 4));
  Dataset again;
  again.X = once.X;
  again.y = once.y;
  again.column_names = once.column_names;
  const auto twice = standardize(again);
  CHECK((twice.X - once.X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(twice.y_mean) < 1e-12);
  CHECK(twice.col_means.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.col_scales.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("constant column is reported by name") {
  auto ds = random_dataset(6, 3, 2);
  ds.X.col(1).setConstant(4.0);
  try {
    standardize(ds);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("c1") != std::string::npos);
  }
}

TEST_CASE("predictions on the original scale") {
  const auto ds = random_dataset(15, 3, 5);
  const auto sd = standardize(ds);
  RngStream rng(1);
  Vector beta_std(3);
  for (auto& v : beta_std) v = rng.normal();
  const Vector beta_orig = sd.coefficients_original_scale(beta_std);
  for (Eigen::Index i = 0; i < 15; ++i) {
    const Vector row = ds.X.row(i).transpose();
    const double via_std = sd.predict(row, beta_std);
    const double expected = sd.y_mean + (sd.X.row(i) * beta_std)(0);
    const double via_orig = sd.y_mean + (row - sd.col_means).dot(beta_orig);
    CHECK(std::abs(via_std - expected) < 1e-10);
    CHECK(std::abs(via_std - via_orig) < 1e-10);
    CHECK((sd.standardize_row(row) - sd.X.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("write then load is lossless") {
  auto ds = random_dataset(7, 4, 6);
  ds.X(0, 0) = 1.0 / 3.0;
  ds.y(2) = -1e-300;
  const fs::path dir = fs::temp_directory_path() / "fusedhs_test_dataset";
  fs::create_directories(dir);
  const fs::path path = dir / "round.csv";
  write_csv(ds, path);
  const Dataset back = load_csv(path);
  CHECK((back.X.array() == ds.X.array()).all());
  CHECK((back.y.array() == ds.y.array()).all());
  CHECK(back.column_names == ds.column_names);
  fs::remove_all(dir);
}

TEST_CASE("number formatting and atomic writes") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
  const fs::path dir = fs::temp_directory_path() / "fusedhs_test_atomic";
  fs::create_directories(dir);
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  std::ifstream in(dir / "a.txt");
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
  fs::remove_all(dir);
}

TEST_CASE("dataset validation and row removal") {
  auto ds = random_dataset(4, 2, 7);
  const auto smaller = ds.without_row(1);
  CHECK(smaller.n() == 3);
  CHECK(smaller.X.row(1) == ds.X.row(2));
  CHECK(smaller.y(1) == ds.y(2));
  ds.y(0) = std::nan("");
  CHECK_THROWS_AS(ds.validate(), DataError);
}
