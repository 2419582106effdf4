#include "fusedhs/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "fusedhs/config.hpp"
#include "fusedhs/dataset.hpp"
#include "fusedhs/errors.hpp"
#include "fusedhs/inference.hpp"
#include "fusedhs/simulation.hpp"

namespace fusedhs {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string model = "bfh";
  std::string grid;
  std::string methods = "bfl,bfh";
  std::string input;
  std::string out_dir = ".";
  double tau2 = 0.0;
};

struct Outputs {
  fs::path dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    write_file_atomic(dir / name, content);
    written.push_back((dir / name).string());
  }
};

void add_sampler_options(CLI::App& app, RunConfig& cfg, Flags& flags) {
  auto& s = cfg.sampler;
  app.add_option("--seed", s.seed, "Random seed (default: $" + std::string(kSeedEnvVar) + " or 1)");
  app.add_option("--iters", s.iterations, "Gibbs iterations")->capture_default_str();
  app.add_option("--burnin", s.burn_in, "Iterations discarded as burn-in")->capture_default_str();
  app.add_option("--thin", s.thinning, "Keep every k-th post-burn-in draw")->capture_default_str();
  app.add_option("--nu0", s.nu0, "sigma2 prior shape parameter (IG(nu0/2, eta0/2))")
      ->capture_default_str();
  app.add_option("--eta0", s.eta0, "sigma2 prior scale parameter")->capture_default_str();
  app.add_option("--r1", s.r1, "Gamma shape of the coefficient Laplace rate")->capture_default_str();
  app.add_option("--delta1", s.delta1, "Gamma rate of the coefficient Laplace rate")
      ->capture_default_str();
  app.add_option("--r2", s.r2, "Gamma shape of the difference Laplace rate (bfl)")
      ->capture_default_str();
  app.add_option("--delta2", s.delta2, "Gamma rate of the difference Laplace rate (bfl)")
      ->capture_default_str();
  app.add_option("--tau2", flags.tau2, "Fixed global fusion scale for bhh (skips tuning)");
  app.add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
  app.add_option("--out-dir", flags.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--config", "key=value config file; command-line flags take precedence");
}

void add_data_options(CLI::App& app, RunConfig& cfg, Flags& flags, bool grid) {
  app.add_option("--model", flags.model, "blasso | bfl | bfh | bhh")->capture_default_str();
  app.add_option("--input", flags.input, "CSV with a header row and a 'y' column")->required();
  app.add_option("--level", cfg.level, "Credible interval level")->capture_default_str();
  if (grid) {
    app.add_option("--grid", flags.grid, "bhh tuning grid: lo:hi:Klog, lo:hi:Klin or a,b,c");
  }
}

// Appends `--key=value` for every config-file entry whose flag is absent.
std::vector<std::string> merge_config_file(const std::vector<std::string>& args) {
  std::vector<std::string> merged;
  std::string config_path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      const auto eq = a.find('=');
      const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
      given.insert(key);
      if (key == "config") {
        if (eq != std::string::npos) {
          config_path = a.substr(eq + 1);
        } else if (i + 1 < args.size()) {
          config_path = args[++i];
        } else {
          throw ConfigError("--config requires a file");
        }
        continue;
      }
    }
    merged.push_back(a);
  }
  if (config_path.empty()) return merged;
  for (const auto& [key, value] : read_config_file(config_path)) {
    if (!given.count(key)) merged.push_back("--" + key + "=" + value);
  }
  return merged;
}

void resolve(RunConfig& cfg, const Flags& flags, const CLI::App& sub) {
  if (sub.count("--seed") == 0) {
    if (const char* env = std::getenv(kSeedEnvVar)) {
      try {
        cfg.sampler.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string(kSeedEnvVar) + " is not an unsigned integer");
      }
    }
  }
  if (sub.get_option_no_throw("--model")) cfg.model = parse_model(flags.model);
  if (sub.count("--tau2") > 0) cfg.sampler.tilde_tau2_fixed = flags.tau2;
  if (!flags.grid.empty()) cfg.grid = parse_grid(flags.grid);
  if (sub.get_option_no_throw("--methods")) cfg.methods = parse_methods(flags.methods);
  cfg.input = flags.input;
  cfg.out_dir = flags.out_dir;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
}

std::string summary_csv(const Estimate& est, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "coefficient,mean,median,ci_lower,ci_upper\n";
  for (Eigen::Index j = 0; j < est.point.size(); ++j) {
    const std::string name = static_cast<std::size_t>(j) < names.size()
                                 ? names[j]
                                 : "x" + std::to_string(j + 1);
    os << name << ',' << format_number(est.point(j)) << ',' << format_number(est.median(j))
       << ',' << format_number(est.ci_lower(j)) << ',' << format_number(est.ci_upper(j)) << '\n';
  }
  return os.str();
}

std::string draws_csv(const PosteriorDraws& draws) {
  std::ostringstream os;
  for (std::size_t c = 0; c < draws.columns.size(); ++c) os << (c ? "," : "") << draws.columns[c];
  os << '\n';
  for (Eigen::Index s = 0; s < draws.values.rows(); ++s) {
    for (Eigen::Index c = 0; c < draws.values.cols(); ++c) {
      os << (c ? "," : "") << format_number(draws.values(s, c));
    }
    os << '\n';
  }
  return os.str();
}

std::string tuning_csv(const TuningResult& t) {
  std::ostringstream os;
  os << "tau2,waic,lppd,p_waic,selected\n";
  for (std::size_t g = 0; g < t.grid.size(); ++g) {
    os << format_number(t.grid[g]) << ',' << format_number(t.scores[g].waic) << ','
       << format_number(t.scores[g].lppd) << ',' << format_number(t.scores[g].p_waic) << ','
       << (g == t.best_index ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string waic_csv(const ModelScore& s) {
  return "waic,lppd,p_waic\n" + format_number(s.waic) + ',' + format_number(s.lppd) + ',' +
         format_number(s.p_waic) + '\n';
}

void run_fit(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  const Dataset ds = load_csv(cfg.input);
  const StandardizedDataset sd = standardize(ds);
  const ModelData md(sd);
  const RngStream rng(cfg.sampler.seed);
  const Fit fit = fit_model(cfg.model, md, cfg.grid, cfg.sampler, rng, cfg.threads);
  const Estimate est = summarize(fit.draws, cfg.level);
  outputs.write("summary.csv", summary_csv(est, sd.column_names));
  if (fit.tuning) outputs.write("tuning.csv", tuning_csv(*fit.tuning));
  if (cfg.waic) {
    const ModelScore score = compute_waic(fit.draws, md);
    outputs.write("waic.csv", waic_csv(score));
    out << "waic " << format_number(score.waic) << '\n';
  }
  if (cfg.write_draws) outputs.write("draws.csv", draws_csv(fit.draws));
  out << model_name(cfg.model) << ": " << fit.draws.size() << " draws retained, "
      << est.point.size() << " coefficients\n";
}

void run_tune(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  const Dataset ds = load_csv(cfg.input);
  const StandardizedDataset sd = standardize(ds);
  const ModelData md(sd);
  const std::vector<double> grid = cfg.grid.empty() ? default_bhh_grid() : cfg.grid;
  const TuningResult t =
      select_tuning(grid, cfg.model, md, cfg.sampler, RngStream(cfg.sampler.seed), cfg.threads);
  outputs.write("tuning.csv", tuning_csv(t));
  out << "selected tau2 " << format_number(t.best) << '\n';
}

void run_loocv(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  const Dataset ds = load_csv(cfg.input);
  const LoocvResult r =
      loocv(cfg.model, ds, cfg.grid, cfg.sampler, RngStream(cfg.sampler.seed), cfg.threads);
  std::ostringstream folds;
  folds << "fold,y,prediction,squared_error" << (r.fold_tuning.empty() ? "" : ",tau2") << '\n';
  for (std::size_t i = 0; i < r.fold_errors.size(); ++i) {
    folds << i + 1 << ',' << format_number(ds.y(static_cast<Eigen::Index>(i))) << ','
          << format_number(r.fold_predictions[i]) << ',' << format_number(r.fold_errors[i]);
    if (!r.fold_tuning.empty()) folds << ',' << format_number(r.fold_tuning[i]);
    folds << '\n';
  }
  outputs.write("loocv_folds.csv", folds.str());
  outputs.write("loocv.csv", "model,folds,cv_mean,cv_sd\n" + std::string(model_name(cfg.model)) +
                                 ',' + std::to_string(r.fold_errors.size()) + ',' +
                                 format_number(r.cv_mean) + ',' + format_number(r.cv_sd) + '\n');
  out << "cv " << format_number(r.cv_mean) << " (sd " << format_number(r.cv_sd) << ")\n";
}

void run_simulate(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  SimulationCaseSpec spec = make_case(cfg.case_id, cfg.sigma, cfg.n, cfg.beta_variant, cfg.p,
                                      cfg.reps);
  BenchmarkOptions options;
  options.bhh_grid = cfg.grid;
  options.threads = cfg.threads;
  const MetricsReport report =
      run_benchmark({spec}, cfg.methods, cfg.sampler, RngStream(cfg.sampler.seed), options);
  outputs.write("metrics.csv", metrics_csv(report));
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  for (const auto& row : report.rows) {
    out << row.case_label << ' ' << row.method << " mse " << format_number(row.mse.mean) << '\n';
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  Flags flags;
  CLI::App app{"Gibbs samplers for Bayesian sparse and fused linear regression", "fusedhs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* fit = app.add_subcommand("fit", "Run one chain on a CSV and summarize the coefficients");
  add_data_options(*fit, cfg, flags, true);
  add_sampler_options(*fit, cfg, flags);
  fit->add_flag("--waic", cfg.waic, "Also write waic.csv");
  fit->add_flag("--draws", cfg.write_draws, "Also write every retained draw to draws.csv");

  auto* tune = app.add_subcommand("tune", "Select the bhh global fusion scale by WAIC");
  add_data_options(*tune, cfg, flags, true);
  add_sampler_options(*tune, cfg, flags);

  auto* cv = app.add_subcommand("loocv", "Leave-one-out cross-validation on a CSV");
  add_data_options(*cv, cfg, flags, true);
  add_sampler_options(*cv, cfg, flags);

  auto* sim = app.add_subcommand("simulate", "Synthetic benchmark for one case");
  add_sampler_options(*sim, cfg, flags);
  sim->add_option("--case", cfg.case_id, "Case 1-4")->capture_default_str();
  sim->add_option("--sigma", cfg.sigma, "Noise standard deviation")->capture_default_str();
  sim->add_option("--beta", cfg.beta_variant, "True-coefficient variant for cases 1/2")
      ->capture_default_str();
  sim->add_option("--n", cfg.n, "Rows per replicate")->capture_default_str();
  sim->add_option("--p", cfg.p, "Predictors for cases 3/4")->capture_default_str();
  sim->add_option("--reps", cfg.reps, "Replications")->capture_default_str();
  sim->add_option("--methods", flags.methods, "Comma-separated models")->capture_default_str();
  sim->add_option("--grid", flags.grid, "bhh tuning grid");

  try {
    std::vector<std::string> args = merge_config_file(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    resolve(cfg, flags, *sub);
    Outputs outputs{cfg.out_dir, {}};
    if (cfg.command == "fit") run_fit(cfg, outputs, out);
    if (cfg.command == "tune") run_tune(cfg, outputs, out);
    if (cfg.command == "loocv") run_loocv(cfg, outputs, out);
    if (cfg.command == "simulate") run_simulate(cfg, outputs, out);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file_atomic(outputs.dir / "manifest.txt", render_manifest(cfg, wall, outputs.written));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterDomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InsufficientDrawsError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalSingularityError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace fusedhs
