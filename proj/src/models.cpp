#include "fusedhs/models.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <span>

#include "fusedhs/distributions.hpp"
#include "fusedhs/errors.hpp"

namespace fusedhs {

namespace {

// Lower bound on beta_j^2 (or a squared difference) inside the mean of the
// inverse-Gaussian conditional; exact zeros occur at the neutral start.
constexpr double kBetaSqFloor = 1e-12;

double keep_positive(double x) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = std::numeric_limits<double>::max();
  if (std::isnan(x)) return lo;
  return std::clamp(x, lo, hi);
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

bool all_positive(const Vector& v) {
  return (v.array() > 0.0).all() && v.allFinite();
}

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

// 1/tau2_j ~ InverseGaussian(sqrt(sigma2 * rate / b_j^2), rate), for b = beta or a
// vector of differences.
void update_laplace_scales(const Vector& b, double sigma2, double rate, Vector& scales,
                           RngStream& rng) {
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double b2 = std::max(b(j) * b(j), kBetaSqFloor);
    const double mean = std::sqrt(sigma2 * rate / b2);
    scales(j) = keep_positive(1.0 / draw_inverse_gaussian(mean, rate, rng));
  }
}

double draw_sigma2(ModelKind m, const ModelData& data, const Vector& beta,
                   const PrecisionMatrix& binv, const SamplerConfig& cfg, RngStream& rng) {
  const double shape = 0.5 * sigma2_conditional_shape(m, data.n(), data.p(), cfg.nu0);
  const double scale =
      0.5 * (data.residual_sum_of_squares(beta) + binv.quadratic_form(beta) + cfg.eta0);
  return keep_positive(draw_inverse_gamma(shape, scale, rng));
}

Vector successive_differences(const Vector& beta) {
  const Eigen::Index p = beta.size();
  if (p < 2) return Vector(0);
  return beta.tail(p - 1) - beta.head(p - 1);
}

std::vector<std::string> beta_columns(std::size_t p) {
  std::vector<std::string> c;
  for (std::size_t j = 1; j <= p; ++j) c.push_back("beta_" + std::to_string(j));
  c.push_back("sigma2");
  for (std::size_t j = 1; j <= p; ++j) c.push_back("tau2_" + std::to_string(j));
  return c;
}

}  // namespace

std::string_view model_name(ModelKind m) {
  switch (m) {
    case ModelKind::BayesianLasso: return "blasso";
    case ModelKind::BayesianFusedLasso: return "bfl";
    case ModelKind::FusedHorseshoe: return "bfh";
    case ModelKind::HorsesHorseshoe: return "bhh";
  }
  return "unknown";
}

ModelKind parse_model(std::string_view name) {
  if (name == "blasso") return ModelKind::BayesianLasso;
  if (name == "bfl") return ModelKind::BayesianFusedLasso;
  if (name == "bfh") return ModelKind::FusedHorseshoe;
  if (name == "bhh") return ModelKind::HorsesHorseshoe;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected blasso, bfl, bfh or bhh)");
}

void SamplerConfig::validate() const {
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (burn_in >= iterations) throw ConfigError("burn_in must be smaller than iterations");
  if (thinning == 0) throw ConfigError("thinning must be positive");
  const std::pair<const char*, double> positives[] = {
      {"nu0", nu0}, {"eta0", eta0}, {"r1", r1}, {"delta1", delta1}, {"r2", r2}, {"delta2", delta2}};
  for (const auto& [name, v] : positives) {
    if (!positive(v)) throw ConfigError(std::string(name) + " must be positive");
  }
  if (tilde_tau2_fixed && !positive(*tilde_tau2_fixed)) {
    throw ConfigError("tilde_tau2_fixed must be positive");
  }
}

std::size_t SamplerConfig::retained() const {
  if (burn_in >= iterations || thinning == 0) return 0;
  return (iterations - burn_in) / thinning;
}

ModelData::ModelData(const Matrix& X, const Vector& y) : x_(X), y_(y) {
  if (X.rows() != y.size()) throw DataError("design rows and response length differ");
  if (X.cols() < 1) throw DataError("design has no columns");
  xtx_ = X.transpose() * X;
  xty_ = X.transpose() * y;
}

double ModelData::residual_sum_of_squares(const Vector& beta) const {
  return (y_ - x_ * beta).squaredNorm();
}

// ---------------------------------------------------------------------------
// states

FusedChainState FusedChainState::initial(std::size_t p) {
  const auto n = static_cast<Eigen::Index>(p);
  const auto m = static_cast<Eigen::Index>(p > 0 ? p - 1 : 0);
  FusedChainState s;
  s.beta = Vector::Zero(n);
  s.tau2 = Vector::Ones(n);
  s.lambda2 = Vector::Ones(m);
  s.nu = Vector::Ones(m);
  return s;
}

bool FusedChainState::valid() const {
  const auto p = beta.size();
  return p >= 1 && tau2.size() == p && lambda2.size() == p - 1 && nu.size() == p - 1 &&
         beta.allFinite() && positive(sigma2) && all_positive(tau2) &&
         positive(tilde_lambda1_sq) && positive(tilde_tau2) && all_positive(lambda2) &&
         all_positive(nu) && positive(xi);
}

PrecisionMatrix FusedChainState::precision() const {
  return build_fused_precision(as_span(tau2), as_span(lambda2), tilde_tau2);
}

HorsesChainState HorsesChainState::initial(std::size_t p, double tilde_tau2) {
  const auto n = static_cast<Eigen::Index>(p);
  const auto m = static_cast<Eigen::Index>(pair_count(p));
  HorsesChainState s;
  s.beta = Vector::Zero(n);
  s.tau2 = Vector::Ones(n);
  s.lambda2_pairs = Vector::Ones(m);
  s.nu_pairs = Vector::Ones(m);
  s.tilde_tau2 = tilde_tau2;
  return s;
}

bool HorsesChainState::valid() const {
  const auto p = static_cast<std::size_t>(beta.size());
  const auto m = static_cast<Eigen::Index>(pair_count(p));
  return p >= 1 && tau2.size() == beta.size() && lambda2_pairs.size() == m &&
         nu_pairs.size() == m && beta.allFinite() && positive(sigma2) && all_positive(tau2) &&
         positive(tilde_lambda1_sq) && all_positive(lambda2_pairs) && all_positive(nu_pairs) &&
         positive(tilde_tau2);
}

PrecisionMatrix HorsesChainState::precision() const {
  return build_horses_precision(as_span(tau2), as_span(lambda2_pairs), tilde_tau2);
}

BaselineChainState BaselineChainState::initial(std::size_t p) {
  const auto n = static_cast<Eigen::Index>(p);
  BaselineChainState s;
  s.beta = Vector::Zero(n);
  s.tau2 = Vector::Ones(n);
  s.tilde_tau2 = Vector::Ones(p > 0 ? n - 1 : 0);
  return s;
}

bool BaselineChainState::valid() const {
  const auto p = beta.size();
  return p >= 1 && tau2.size() == p && tilde_tau2.size() == p - 1 && beta.allFinite() &&
         positive(sigma2) && all_positive(tau2) && all_positive(tilde_tau2) &&
         positive(lambda1_sq) && positive(lambda2_sq);
}

PrecisionMatrix BaselineChainState::precision(ModelKind variant) const {
  if (variant == ModelKind::BayesianFusedLasso) {
    return build_fused_precision(as_span(tau2), as_span(tilde_tau2), 1.0);
  }
  if (!all_positive(tau2)) throw ParameterDomainError("tau2 must be positive");
  PrecisionMatrix::Banded band{tau2.cwiseMax(kScaleFloor).cwiseInverse(),
                               Vector::Zero(std::max<Eigen::Index>(tau2.size() - 1, 0))};
  return PrecisionMatrix(std::move(band));
}

// ---------------------------------------------------------------------------
// conditionals

double sigma2_conditional_shape(ModelKind m, std::size_t n, std::size_t p, double nu0) {
  const auto nd = static_cast<double>(n);
  const auto pd = static_cast<double>(p);
  switch (m) {
    case ModelKind::BayesianLasso: return nd + pd + nu0;
    case ModelKind::BayesianFusedLasso:
    case ModelKind::FusedHorseshoe: return nd + 2.0 * pd - 1.0 + nu0;
    case ModelKind::HorsesHorseshoe: return nd + pd * (pd + 1.0) / 2.0 + nu0;
  }
  return 0.0;
}

GaussianConditional beta_conditional(const FusedChainState& s, const ModelData& data) {
  return GaussianConditional(data.xtx(), data.xty(), s.precision(), s.sigma2);
}

GaussianConditional beta_conditional(const HorsesChainState& s, const ModelData& data) {
  return GaussianConditional(data.xtx(), data.xty(), s.precision(), s.sigma2);
}

GaussianConditional beta_conditional(const BaselineChainState& s, ModelKind variant,
                                     const ModelData& data) {
  return GaussianConditional(data.xtx(), data.xty(), s.precision(variant), s.sigma2);
}

// ---------------------------------------------------------------------------
// kernels

FusedChainState bfh_step(const FusedChainState& state, const ModelData& data,
                         const SamplerConfig& cfg, RngStream& rng) {
  const auto p = static_cast<double>(data.p());
  FusedChainState next = state;

  next.beta = beta_conditional(next, data).draw(rng);
  next.sigma2 = draw_sigma2(ModelKind::FusedHorseshoe, data, next.beta, next.precision(), cfg, rng);

  update_laplace_scales(next.beta, next.sigma2, next.tilde_lambda1_sq, next.tau2, rng);
  next.tilde_lambda1_sq =
      keep_positive(draw_gamma(p + cfg.r1, 0.5 * next.tau2.sum() + cfg.delta1, rng));

  const Vector diff = successive_differences(next.beta);
  const Vector diff2 = diff.cwiseAbs2();
  const double weighted = diff2.cwiseQuotient(next.lambda2).sum();
  next.tilde_tau2 = keep_positive(
      draw_inverse_gamma(0.5 * p, weighted / (2.0 * next.sigma2) + 1.0 / next.xi, rng));

  for (Eigen::Index j = 0; j < diff2.size(); ++j) {
    next.lambda2(j) = keep_positive(draw_inverse_gamma(
        1.0, diff2(j) / (2.0 * next.sigma2 * next.tilde_tau2) + 1.0 / next.nu(j), rng));
  }
  for (Eigen::Index j = 0; j < next.nu.size(); ++j) {
    next.nu(j) = keep_positive(draw_inverse_gamma(1.0, 1.0 / next.lambda2(j) + 1.0, rng));
  }
  next.xi = keep_positive(draw_inverse_gamma(1.0, 1.0 / next.tilde_tau2 + 1.0, rng));

  assert(next.valid());
  return next;
}

HorsesChainState bhh_step(const HorsesChainState& state, const ModelData& data,
                          const SamplerConfig& cfg, RngStream& rng) {
  if (!cfg.tilde_tau2_fixed) {
    throw ConfigError("bhh requires a fixed tilde_tau2 (set tilde_tau2_fixed or tune over a grid)");
  }
  const std::size_t p = data.p();
  HorsesChainState next = state;
  next.tilde_tau2 = *cfg.tilde_tau2_fixed;

  next.beta = beta_conditional(next, data).draw(rng);
  next.sigma2 =
      draw_sigma2(ModelKind::HorsesHorseshoe, data, next.beta, next.precision(), cfg, rng);

  update_laplace_scales(next.beta, next.sigma2, next.tilde_lambda1_sq, next.tau2, rng);
  next.tilde_lambda1_sq = keep_positive(
      draw_gamma(static_cast<double>(p) + cfg.r1, 0.5 * next.tau2.sum() + cfg.delta1, rng));

  const double denom = 2.0 * next.sigma2 * next.tilde_tau2;
  for (std::size_t j = 1; j < p; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      const auto idx = static_cast<Eigen::Index>(pair_index(j, k));
      const double d = next.beta(j) - next.beta(k);
      next.lambda2_pairs(idx) =
          keep_positive(draw_inverse_gamma(1.0, d * d / denom + 1.0 / next.nu_pairs(idx), rng));
    }
  }
  for (Eigen::Index idx = 0; idx < next.nu_pairs.size(); ++idx) {
    next.nu_pairs(idx) =
        keep_positive(draw_inverse_gamma(1.0, 1.0 / next.lambda2_pairs(idx) + 1.0, rng));
  }

  assert(next.valid());
  return next;
}

BaselineChainState baseline_step(ModelKind variant, const BaselineChainState& state,
                                 const ModelData& data, const SamplerConfig& cfg,
                                 RngStream& rng) {
  if (variant != ModelKind::BayesianLasso && variant != ModelKind::BayesianFusedLasso) {
    throw ConfigError("baseline_step supports blasso and bfl only");
  }
  const bool fused = variant == ModelKind::BayesianFusedLasso;
  const auto p = static_cast<double>(data.p());
  BaselineChainState next = state;

  next.beta = beta_conditional(next, variant, data).draw(rng);
  next.sigma2 = draw_sigma2(variant, data, next.beta, next.precision(variant), cfg, rng);

  update_laplace_scales(next.beta, next.sigma2, next.lambda1_sq, next.tau2, rng);
  if (fused) {
    update_laplace_scales(successive_differences(next.beta), next.sigma2, next.lambda2_sq,
                          next.tilde_tau2, rng);
  }
  next.lambda1_sq = keep_positive(draw_gamma(p + cfg.r1, 0.5 * next.tau2.sum() + cfg.delta1, rng));
  if (fused) {
    next.lambda2_sq = keep_positive(
        draw_gamma(p - 1.0 + cfg.r2, 0.5 * next.tilde_tau2.sum() + cfg.delta2, rng));
  }

  assert(next.valid());
  return next;
}

// ---------------------------------------------------------------------------
// chain runner

namespace {

template <class State, class Step, class Record>
void drive(State state, const SamplerConfig& cfg, RngStream& rng, PosteriorDraws& out,
           Step step, Record record) {
  Eigen::Index row = 0;
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    try {
      state = step(state, rng);
    } catch (const NumericalSingularityError& e) {
      throw NumericalSingularityError("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thinning == 0) {
      auto r = out.values.row(row++);
      r.head(static_cast<Eigen::Index>(out.p)) = state.beta.transpose();
      r(static_cast<Eigen::Index>(out.p)) = state.sigma2;
      record(state, r);
    }
  }
}

}  // namespace

PosteriorDraws run_chain(ModelKind model, const ModelData& data, const SamplerConfig& cfg,
                         RngStream& rng) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t p = data.p();
  const auto P = static_cast<Eigen::Index>(p);

  PosteriorDraws out;
  out.model = model;
  out.p = p;
  out.config = cfg;
  out.columns = beta_columns(p);

  switch (model) {
    case ModelKind::FusedHorseshoe: {
      out.columns.push_back("tilde_lambda1_sq");
      out.columns.push_back("tilde_tau2");
      for (std::size_t j = 2; j <= p; ++j) out.columns.push_back("lambda2_" + std::to_string(j));
      for (std::size_t j = 2; j <= p; ++j) out.columns.push_back("nu_" + std::to_string(j));
      out.columns.push_back("xi");
      out.values.resize(static_cast<Eigen::Index>(cfg.retained()),
                        static_cast<Eigen::Index>(out.columns.size()));
      drive(
          FusedChainState::initial(p), cfg, rng, out,
          [&](const FusedChainState& s, RngStream& r) { return bfh_step(s, data, cfg, r); },
          [&](const FusedChainState& s, auto row) {
            Eigen::Index c = P + 1;
            row.segment(c, P) = s.tau2.transpose();
            c += P;
            row(c++) = s.tilde_lambda1_sq;
            row(c++) = s.tilde_tau2;
            row.segment(c, P - 1) = s.lambda2.transpose();
            c += P - 1;
            row.segment(c, P - 1) = s.nu.transpose();
            c += P - 1;
            row(c) = s.xi;
          });
      break;
    }
    case ModelKind::HorsesHorseshoe: {
      if (!cfg.tilde_tau2_fixed) {
        throw ConfigError("bhh requires a fixed tilde_tau2 (set tilde_tau2_fixed or tune over a grid)");
      }
      out.columns.push_back("tilde_lambda1_sq");
      for (const char* prefix : {"lambda2_", "nu_"}) {
        for (std::size_t j = 1; j < p; ++j) {
          for (std::size_t k = 0; k < j; ++k) {
            out.columns.push_back(prefix + std::to_string(j + 1) + "_" + std::to_string(k + 1));
          }
        }
      }
      out.values.resize(static_cast<Eigen::Index>(cfg.retained()),
                        static_cast<Eigen::Index>(out.columns.size()));
      const auto m = static_cast<Eigen::Index>(pair_count(p));
      drive(
          HorsesChainState::initial(p, *cfg.tilde_tau2_fixed), cfg, rng, out,
          [&](const HorsesChainState& s, RngStream& r) { return bhh_step(s, data, cfg, r); },
          [&](const HorsesChainState& s, auto row) {
            Eigen::Index c = P + 1;
            row.segment(c, P) = s.tau2.transpose();
            c += P;
            row(c++) = s.tilde_lambda1_sq;
            row.segment(c, m) = s.lambda2_pairs.transpose();
            c += m;
            row.segment(c, m) = s.nu_pairs.transpose();
          });
      break;
    }
    case ModelKind::BayesianLasso:
    case ModelKind::BayesianFusedLasso: {
      const bool fused = model == ModelKind::BayesianFusedLasso;
      if (fused) {
        for (std::size_t j = 2; j <= p; ++j) {
          out.columns.push_back("tilde_tau2_" + std::to_string(j));
        }
      }
      out.columns.push_back("lambda1_sq");
      if (fused) out.columns.push_back("lambda2_sq");
      out.values.resize(static_cast<Eigen::Index>(cfg.retained()),
                        static_cast<Eigen::Index>(out.columns.size()));
      drive(
          BaselineChainState::initial(p), cfg, rng, out,
          [&](const BaselineChainState& s, RngStream& r) {
            return baseline_step(model, s, data, cfg, r);
          },
          [&](const BaselineChainState& s, auto row) {
            Eigen::Index c = P + 1;
            row.segment(c, P) = s.tau2.transpose();
            c += P;
            if (fused) {
              row.segment(c, P - 1) = s.tilde_tau2.transpose();
              c += P - 1;
            }
            row(c++) = s.lambda1_sq;
            if (fused) row(c) = s.lambda2_sq;
          });
      break;
    }
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace fusedhs
