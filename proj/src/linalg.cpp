#include "fusedhs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fusedhs/errors.hpp"

namespace fusedhs {

namespace {

void require_positive_all(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw ParameterDomainError(std::string(what) + "[" + std::to_string(i) +
                                 "] must be positive and finite");
    }
  }
}

double inv_floored(double x) { return 1.0 / std::max(x, kScaleFloor); }

}  // namespace

PrecisionMatrix::PrecisionMatrix(Banded band) : storage_(std::move(band)) {}
PrecisionMatrix::PrecisionMatrix(Matrix dense) : storage_(std::move(dense)) {}

std::size_t PrecisionMatrix::order() const {
  if (is_banded()) return static_cast<std::size_t>(band().diag.size());
  return static_cast<std::size_t>(std::get<Matrix>(storage_).rows());
}

Matrix PrecisionMatrix::to_dense() const {
  if (!is_banded()) return std::get<Matrix>(storage_);
  const auto& b = band();
  const Eigen::Index p = b.diag.size();
  Matrix m = Matrix::Zero(p, p);
  m.diagonal() = b.diag;
  for (Eigen::Index j = 0; j + 1 < p; ++j) {
    m(j, j + 1) = b.off(j);
    m(j + 1, j) = b.off(j);
  }
  return m;
}

double PrecisionMatrix::quadratic_form(const Vector& beta) const {
  if (!is_banded()) {
    const auto& m = std::get<Matrix>(storage_);
    return beta.dot(m.selfadjointView<Eigen::Lower>() * beta);
  }
  const auto& b = band();
  double q = 0.0;
  for (Eigen::Index j = 0; j < b.diag.size(); ++j) q += b.diag(j) * beta(j) * beta(j);
  for (Eigen::Index j = 0; j < b.off.size(); ++j) q += 2.0 * b.off(j) * beta(j) * beta(j + 1);
  return q;
}

void PrecisionMatrix::add_to(Matrix& target) const {
  if (!is_banded()) {
    target += std::get<Matrix>(storage_);
    return;
  }
  const auto& b = band();
  target.diagonal() += b.diag;
  for (Eigen::Index j = 0; j < b.off.size(); ++j) {
    target(j, j + 1) += b.off(j);
    target(j + 1, j) += b.off(j);
  }
}

PrecisionMatrix build_fused_precision(std::span<const double> tau2,
                                      std::span<const double> lambda2, double tilde_tau2) {
  const std::size_t p = tau2.size();
  if (p == 0) throw ParameterDomainError("build_fused_precision: empty tau2");
  if (lambda2.size() + 1 != p) {
    throw ParameterDomainError("build_fused_precision: lambda2 must have p-1 entries");
  }
  require_positive_all(tau2, "tau2");
  require_positive_all(lambda2, "lambda2");
  require_positive_all(std::span<const double>(&tilde_tau2, 1), "tilde_tau2");

  PrecisionMatrix::Banded band{Vector(static_cast<Eigen::Index>(p)),
                               Vector(static_cast<Eigen::Index>(p - 1))};
  for (std::size_t j = 0; j < p; ++j) band.diag(j) = inv_floored(tau2[j]);
  for (std::size_t j = 0; j + 1 < p; ++j) {
    const double w = inv_floored(lambda2[j] * tilde_tau2);
    band.diag(j) += w;
    band.diag(j + 1) += w;
    band.off(j) = -w;
  }
  return PrecisionMatrix(std::move(band));
}

PrecisionMatrix build_horses_precision(std::span<const double> tau2,
                                       std::span<const double> lambda2_pairs,
                                       double tilde_tau2) {
  const std::size_t p = tau2.size();
  if (p == 0) throw ParameterDomainError("build_horses_precision: empty tau2");
  if (lambda2_pairs.size() != pair_count(p)) {
    throw ParameterDomainError("build_horses_precision: lambda2_pairs must have p(p-1)/2 entries");
  }
  require_positive_all(tau2, "tau2");
  require_positive_all(lambda2_pairs, "lambda2_pairs");
  require_positive_all(std::span<const double>(&tilde_tau2, 1), "tilde_tau2");

  const auto n = static_cast<Eigen::Index>(p);
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < p; ++i) m(i, i) = inv_floored(tau2[i]);
  for (std::size_t j = 1; j < p; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      const double w = inv_floored(lambda2_pairs[pair_index(j, k)] * tilde_tau2);
      m(j, j) += w;
      m(k, k) += w;
      m(j, k) = -w;
      m(k, j) = -w;
    }
  }
  return PrecisionMatrix(std::move(m));
}

GaussianConditional::GaussianConditional(const Matrix& xtx, const Vector& xty,
                                         const PrecisionMatrix& binv, double sigma2)
    : a_(xtx), sigma2_(sigma2) {
  if (!(sigma2 > 0.0)) throw ParameterDomainError("beta conditional: sigma2 must be positive");
  if (static_cast<std::size_t>(xtx.rows()) != binv.order() || xty.size() != xtx.rows()) {
    throw ParameterDomainError("beta conditional: dimension mismatch");
  }
  binv.add_to(a_);
  llt_.compute(a_);
  if (llt_.info() != Eigen::Success) {
    const double base = 1e-10 * a_.trace() / static_cast<double>(a_.rows());
    std::ostringstream tried;
    double jitter = base;
    bool ok = false;
    for (int attempt = 0; attempt < 3; ++attempt, jitter *= 10.0) {
      Matrix shifted = a_;
      shifted.diagonal().array() += jitter;
      llt_.compute(shifted);
      tried << (attempt ? ", " : "") << jitter;
      if (llt_.info() == Eigen::Success) {
        a_ = std::move(shifted);
        jitter_ = jitter;
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw NumericalSingularityError(
          "Cholesky factorization of X'X + B^{-1} failed; jitter levels tried: " + tried.str());
    }
  }
  mean_ = llt_.solve(xty);
}

Matrix GaussianConditional::covariance() const {
  return sigma2_ * llt_.solve(Matrix::Identity(a_.rows(), a_.cols()));
}

Vector GaussianConditional::draw(RngStream& rng) const {
  Vector z(a_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  // A = L L', so L'^{-1} z has covariance A^{-1}.
  Vector e = llt_.matrixU().solve(z);
  return mean_ + std::sqrt(sigma2_) * e;
}

Vector sample_beta_conditional(const Matrix& xtx, const Vector& xty,
                               const PrecisionMatrix& binv, double sigma2, RngStream& rng) {
  return GaussianConditional(xtx, xty, binv, sigma2).draw(rng);
}

}  // namespace fusedhs
