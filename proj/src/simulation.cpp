#include "fusedhs/simulation.hpp"

#include <cmath>
#include <sstream>

#include "fusedhs/errors.hpp"
#include "fusedhs/inference.hpp"
#include "fusedhs/parallel.hpp"

namespace fusedhs {

namespace {

Vector block_vector(std::initializer_list<double> blocks, std::size_t block, std::size_t p) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(p));
  Eigen::Index at = 0;
  for (double b : blocks) {
    v.segment(at, static_cast<Eigen::Index>(block)).setConstant(b);
    at += static_cast<Eigen::Index>(block);
  }
  return v;
}

MeanSd mean_sd(const std::vector<double>& x) {
  MeanSd out;
  if (x.empty()) return out;
  double sum = 0.0;
  for (double v : x) sum += v;
  out.mean = sum / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
  }
  return out;
}

void check_dims(const std::vector<Vector>& beta_hats, const Vector& beta_star) {
  if (beta_hats.empty()) throw ConfigError("metrics need at least one estimate");
  for (const auto& b : beta_hats) {
    if (b.size() != beta_star.size()) {
      throw ConfigError("estimate dimension " + std::to_string(b.size()) +
                        " does not match true coefficient dimension " +
                        std::to_string(beta_star.size()));
    }
  }
}

}  // namespace

std::string SimulationCaseSpec::label() const {
  std::ostringstream os;
  os << "case" << case_id;
  if (case_id <= 2) os << "_beta" << beta_variant;
  os << "_sigma" << sigma << "_n" << n << "_p" << p();
  return os.str();
}

void SimulationCaseSpec::validate() const {
  if (case_id < 1 || case_id > 4) throw ConfigError("case_id must be 1..4");
  const auto expected = case_id % 2 == 1 ? CovarianceKind::Compound : CovarianceKind::Autoregressive;
  if (covariance != expected) {
    throw ConfigError("case " + std::to_string(case_id) + " has the wrong covariance kind");
  }
  if (case_id >= 3) {
    if (p() < 20) throw ConfigError("cases 3 and 4 need p >= 20");
    const Vector expect = block_vector({3.0, -1.5, 1.0, 2.0}, 5, p());
    if (beta_star != expect) throw ConfigError("cases 3 and 4 fix the true coefficient vector");
  }
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (n < 2) throw ConfigError("n must be at least 2");
  if (replications == 0) throw ConfigError("replications must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("rho must lie in (-1, 1)");
}

SimulationCaseSpec make_case(int case_id, double sigma, std::size_t n, int beta_variant,
                             std::size_t p, std::size_t replications) {
  SimulationCaseSpec spec;
  spec.case_id = case_id;
  spec.sigma = sigma;
  spec.n = n;
  spec.replications = replications;
  spec.covariance = case_id % 2 == 1 ? CovarianceKind::Compound : CovarianceKind::Autoregressive;
  if (case_id == 1 || case_id == 2) {
    if (beta_variant != 1 && beta_variant != 2) throw ConfigError("beta variant must be 1 or 2");
    spec.beta_variant = beta_variant;
    const double level = beta_variant == 1 ? 1.0 : 2.0;
    spec.beta_star = block_vector({0.0, level, 0.0, level}, 5, 20);
  } else if (case_id == 3 || case_id == 4) {
    if (p < 20) throw ConfigError("cases 3 and 4 need p >= 20");
    spec.beta_star = block_vector({3.0, -1.5, 1.0, 2.0}, 5, p);
  } else {
    throw ConfigError("case_id must be 1..4");
  }
  spec.validate();
  return spec;
}

Matrix covariance_matrix(const SimulationCaseSpec& spec) {
  const auto p = static_cast<Eigen::Index>(spec.p());
  Matrix s(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i == j) {
        s(i, j) = 1.0;
      } else if (spec.covariance == CovarianceKind::Compound) {
        s(i, j) = spec.rho;
      } else {
        s(i, j) = std::pow(spec.rho, static_cast<double>(std::abs(i - j)));
      }
    }
  }
  return s;
}

Dataset generate_case(const SimulationCaseSpec& spec, std::size_t replicate_index,
                      const RngStream& rng) {
  spec.validate();
  RngStream stream = rng.derive(static_cast<std::uint64_t>(spec.case_id), replicate_index);
  const Matrix chol = covariance_matrix(spec).llt().matrixL();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.p());

  Dataset ds;
  ds.X.resize(n, p);
  ds.y.resize(n);
  Vector z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = stream.normal();
    ds.X.row(i) = (chol * z).transpose();
  }
  for (Eigen::Index i = 0; i < n; ++i) ds.y(i) = spec.sigma * stream.normal();
  ds.y += ds.X * spec.beta_star;
  for (Eigen::Index j = 0; j < p; ++j) ds.column_names.push_back("x" + std::to_string(j + 1));
  ds.provenance = spec.label() + "_rep" + std::to_string(replicate_index);
  return ds;
}

MeanSd mse(const std::vector<Vector>& beta_hats, const Vector& beta_star) {
  check_dims(beta_hats, beta_star);
  std::vector<double> v;
  v.reserve(beta_hats.size());
  for (const auto& b : beta_hats) v.push_back((b - beta_star).squaredNorm());
  return mean_sd(v);
}

std::vector<std::pair<std::size_t, std::size_t>> nonzero_difference_pairs(const Vector& beta_star) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (Eigen::Index j = 1; j < beta_star.size(); ++j) {
    if (beta_star(j) != beta_star(j - 1)) {
      pairs.emplace_back(static_cast<std::size_t>(j), static_cast<std::size_t>(j + 1));
    }
  }
  return pairs;
}

MeanSd mse_diff(const std::vector<Vector>& beta_hats, const Vector& beta_star,
                std::vector<std::string>* warnings) {
  check_dims(beta_hats, beta_star);
  const auto pairs = nonzero_difference_pairs(beta_star);
  if (pairs.empty()) {
    if (warnings) {
      warnings->push_back("true coefficients have no non-zero successive difference; mse_diff set to 0");
    }
    return {};
  }
  std::vector<double> v;
  v.reserve(beta_hats.size());
  for (const auto& b : beta_hats) {
    double s = 0.0;
    for (const auto& [lo, hi] : pairs) {
      const auto a = static_cast<Eigen::Index>(lo - 1);
      const auto c = static_cast<Eigen::Index>(hi - 1);
      const double e = (b(c) - b(a)) - (beta_star(c) - beta_star(a));
      s += e * e;
    }
    v.push_back(s);
  }
  return mean_sd(v);
}

MeanSd pse(const std::vector<Vector>& beta_hats, const Vector& beta_star, const Matrix& sigma) {
  check_dims(beta_hats, beta_star);
  if (sigma.rows() != beta_star.size() || sigma.cols() != beta_star.size()) {
    throw ConfigError("covariance dimension does not match coefficients");
  }
  std::vector<double> v;
  v.reserve(beta_hats.size());
  for (const auto& b : beta_hats) {
    const Vector e = b - beta_star;
    v.push_back(e.dot(sigma * e));
  }
  return mean_sd(v);
}

MetricsReport run_benchmark(const std::vector<SimulationCaseSpec>& cases,
                            const std::vector<ModelKind>& methods, const SamplerConfig& cfg,
                            const RngStream& rng, const BenchmarkOptions& options) {
  if (cases.empty()) throw ConfigError("benchmark needs at least one case");
  if (methods.empty()) throw ConfigError("benchmark needs at least one method");
  cfg.validate();
  for (const auto& c : cases) c.validate();

  struct Task {
    std::size_t case_index;
    std::size_t replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (std::size_t r = 0; r < cases[c].replications; ++r) tasks.push_back({c, r});
  }
  // estimates[task][method]; empty when the fit failed.
  std::vector<std::vector<std::optional<Vector>>> estimates(
      tasks.size(), std::vector<std::optional<Vector>>(methods.size()));

  const std::vector<double> grid =
      options.bhh_grid.empty() ? default_bhh_grid() : options.bhh_grid;

  parallel_for(tasks.size(), options.threads, [&](std::size_t t) {
    const auto& spec = cases[tasks[t].case_index];
    const Dataset ds = generate_case(spec, tasks[t].replicate, rng);
    const StandardizedDataset sd = standardize(ds);
    const ModelData md(sd);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const RngStream stream = rng.derive(0x5eed0000ULL + tasks[t].case_index, tasks[t].replicate)
                                   .derive(static_cast<std::uint64_t>(methods[m]));
      try {
        const Fit fit = fit_model(methods[m], md, grid, cfg, stream);
        estimates[t][m] = sd.coefficients_original_scale(summarize(fit.draws).point);
      } catch (const NumericalSingularityError&) {
        estimates[t][m].reset();
      }
    }
  });

  MetricsReport report;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Matrix sigma = covariance_matrix(cases[c]);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      MetricsRow row;
      row.case_label = cases[c].label();
      row.method = std::string(model_name(methods[m]));
      std::vector<Vector> hats;
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].case_index != c) continue;
        if (estimates[t][m]) {
          hats.push_back(*estimates[t][m]);
        } else {
          ++row.replications_failed;
        }
      }
      row.replications_ok = hats.size();
      if (row.replications_failed > 0) {
        report.warnings.push_back(row.case_label + "/" + row.method + ": " +
                                  std::to_string(row.replications_failed) +
                                  " replicate(s) failed numerically and were excluded");
      }
      if (!hats.empty()) {
        row.mse = mse(hats, cases[c].beta_star);
        row.mse_diff = mse_diff(hats, cases[c].beta_star, &report.warnings);
        row.pse = pse(hats, cases[c].beta_star, sigma);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string metrics_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "case,method,reps_ok,reps_failed,mse,mse_sd,mse_diff,mse_diff_sd,pse,pse_sd\n";
  for (const auto& r : report.rows) {
    os << r.case_label << ',' << r.method << ',' << r.replications_ok << ','
       << r.replications_failed << ',' << format_number(r.mse.mean) << ','
       << format_number(r.mse.sd) << ',' << format_number(r.mse_diff.mean) << ','
       << format_number(r.mse_diff.sd) << ',' << format_number(r.pse.mean) << ','
       << format_number(r.pse.sd) << '\n';
  }
  return os.str();
}

}  // namespace fusedhs
