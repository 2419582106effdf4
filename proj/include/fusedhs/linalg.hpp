#pragma once

#include <cstddef>
#include <span>
#include <variant>

#include <Eigen/Dense>

#include "fusedhs/rng.hpp"

namespace fusedhs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Smallest value a scale latent may take before it is inverted.
inline constexpr double kScaleFloor = 1e-12;

/// Packed storage index of the unordered pair {j, k}, j != k, zero-based.
/// Pairs are laid out as the strict lower triangle, row by row:
/// (1,0), (2,0), (2,1), (3,0), ...
constexpr std::size_t pair_index(std::size_t j, std::size_t k) {
  if (j < k) {
    const std::size_t t = j;
    j = k;
    k = t;
  }
  return j * (j - 1) / 2 + k;
}

constexpr std::size_t pair_count(std::size_t p) { return p * (p - 1) / 2; }

/// Symmetric prior precision B^{-1}. Tridiagonal priors keep band storage
/// (diagonal + first off-diagonal); pairwise priors are dense.
class PrecisionMatrix {
 public:
  struct Banded {
    Vector diag;
    Vector off;  // off(j) = entry (j, j+1) = entry (j+1, j)
  };

  explicit PrecisionMatrix(Banded band);
  explicit PrecisionMatrix(Matrix dense);

  std::size_t order() const;
  bool is_banded() const { return std::holds_alternative<Banded>(storage_); }
  const Banded& band() const { return std::get<Banded>(storage_); }

  Matrix to_dense() const;

  /// beta' B^{-1} beta, evaluated on the native storage.
  double quadratic_form(const Vector& beta) const;

  /// target += B^{-1}
  void add_to(Matrix& target) const;

 private:
  std::variant<Banded, Matrix> storage_;
};

/// Tridiagonal precision for a Laplace prior on coefficients and a
/// Gaussian scale-mixture prior on successive differences.
///   diag(j) = 1/tau2_j + 1/(lambda2_j tilde_tau2) + 1/(lambda2_{j+1} tilde_tau2)
///   off(j)  = -1/(lambda2_{j+1} tilde_tau2)
/// `lambda2` has p-1 entries; lambda2[j-1] scales the difference beta_j - beta_{j-1}.
PrecisionMatrix build_fused_precision(std::span<const double> tau2,
                                      std::span<const double> lambda2, double tilde_tau2);

/// Dense precision for a prior on all pairwise differences.
///   (i,i) = 1/tau2_i + (1/tilde_tau2) sum_{l != i} 1/lambda2_{i,l}
///   (i,j) = -1/(lambda2_{i,j} tilde_tau2)
/// `lambda2_pairs` is packed per pair_index().
PrecisionMatrix build_horses_precision(std::span<const double> tau2,
                                       std::span<const double> lambda2_pairs,
                                       double tilde_tau2);

/// Gaussian full conditional N(A^{-1} X'y, sigma2 A^{-1}) with A = X'X + B^{-1},
/// kept in factored form.
class GaussianConditional {
 public:
  GaussianConditional(const Matrix& xtx, const Vector& xty, const PrecisionMatrix& binv,
                      double sigma2);

  const Vector& mean() const { return mean_; }
  double sigma2() const { return sigma2_; }
  /// Diagonal jitter that was added to A before the factorization succeeded.
  double jitter() const { return jitter_; }

  Matrix precision() const { return a_; }
  Matrix covariance() const;

  Vector draw(RngStream& rng) const;

 private:
  Matrix a_;
  Eigen::LLT<Matrix> llt_;
  Vector mean_;
  double sigma2_;
  double jitter_ = 0.0;
};

/// Exact draw of beta from its Gaussian full conditional. Throws
/// NumericalSingularityError when A cannot be factored after three jitter
/// escalations.
Vector sample_beta_conditional(const Matrix& xtx, const Vector& xty,
                               const PrecisionMatrix& binv, double sigma2, RngStream& rng);

}  // namespace fusedhs
