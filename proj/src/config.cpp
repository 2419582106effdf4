#include "fusedhs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fusedhs/dataset.hpp"
#include "fusedhs/errors.hpp"
#include "fusedhs/inference.hpp"

namespace fusedhs {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const std::string t = strip(s);
  const char* first = t.data();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(context + ": cannot parse number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(strip(item));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  sampler.validate();
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  if (threads == 0) throw ConfigError("threads must be positive");
  if ((command == "fit" || command == "loocv" || command == "tune") && input.empty()) {
    throw ConfigError(command + " requires --input");
  }
  if (command == "tune" && model != ModelKind::HorsesHorseshoe) {
    throw ConfigError("tune is defined for --model bhh");
  }
  if (command == "simulate" && methods.empty()) throw ConfigError("simulate requires --methods");
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = strip(text);
  if (t.empty()) throw ConfigError("empty grid");
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("grid '" + t + "' must look like lo:hi:Klog");
    const double lo = to_double(parts[0], "grid");
    const double hi = to_double(parts[1], "grid");
    std::string spec = parts[2];
    bool log_scale = true;
    if (spec.size() > 3 && spec.compare(spec.size() - 3, 3, "log") == 0) {
      spec.resize(spec.size() - 3);
    } else if (spec.size() > 3 && spec.compare(spec.size() - 3, 3, "lin") == 0) {
      spec.resize(spec.size() - 3);
      log_scale = false;
    }
    const double k = to_double(spec, "grid point count");
    if (k < 1.0 || k != std::floor(k)) throw ConfigError("grid point count must be a positive integer");
    const auto count = static_cast<std::size_t>(k);
    if (log_scale) return log_spaced_grid(lo, hi, count);
    if (!(hi >= lo)) throw ConfigError("grid needs lo <= hi");
    std::vector<double> g(count, lo);
    for (std::size_t i = 1; i < count; ++i) {
      g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return g;
  }
  std::vector<double> g;
  for (const auto& item : split(t, ',')) g.push_back(to_double(item, "grid"));
  for (double v : g) {
    if (!(v > 0.0)) throw ConfigError("grid values must be positive");
  }
  return g;
}

std::vector<ModelKind> parse_methods(const std::string& text) {
  std::vector<ModelKind> out;
  for (const auto& item : split(text, ',')) {
    if (!item.empty()) out.push_back(parse_model(item));
  }
  if (out.empty()) throw ConfigError("no methods given");
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = strip(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = strip(t.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(key, strip(t.substr(eq + 1)));
  }
  return out;
}

std::string render_manifest(const RunConfig& cfg, double wall_seconds,
                            const std::vector<std::string>& outputs) {
  std::ostringstream os;
  const auto& s = cfg.sampler;
  // Lines without '#' use CLI flag names, so a manifest is itself a valid
  // --config file for the same subcommand.
  os << "# program=fusedhs\n"
     << "# version=" << kVersion << '\n'
     << "# eigen=" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
     << EIGEN_MINOR_VERSION << '\n'
     << "# command=" << cfg.command << '\n'
     << "seed=" << s.seed << '\n'
     << "iters=" << s.iterations << '\n'
     << "burnin=" << s.burn_in << '\n'
     << "thin=" << s.thinning << '\n'
     << "nu0=" << format_number(s.nu0) << '\n'
     << "eta0=" << format_number(s.eta0) << '\n'
     << "r1=" << format_number(s.r1) << '\n'
     << "delta1=" << format_number(s.delta1) << '\n'
     << "r2=" << format_number(s.r2) << '\n'
     << "delta2=" << format_number(s.delta2) << '\n';
  if (s.tilde_tau2_fixed) os << "tau2=" << format_number(*s.tilde_tau2_fixed) << '\n';
  if (cfg.command == "simulate") {
    os << "case=" << cfg.case_id << '\n'
       << "sigma=" << format_number(cfg.sigma) << '\n'
       << "beta=" << cfg.beta_variant << '\n'
       << "n=" << cfg.n << '\n'
       << "p=" << cfg.p << '\n'
       << "reps=" << cfg.reps << '\n'
       << "methods=";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
      os << (i ? "," : "") << model_name(cfg.methods[i]);
    }
    os << '\n';
  } else {
    os << "model=" << model_name(cfg.model) << '\n' << "input=" << cfg.input.string() << '\n';
  }
  if (!cfg.grid.empty()) {
    os << "grid=";
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
      os << (i ? "," : "") << format_number(cfg.grid[i]);
    }
    os << '\n';
  }
  os << "level=" << format_number(cfg.level) << '\n'
     << "threads=" << cfg.threads << '\n'
     << "# wall_seconds=" << wall_seconds << '\n';
  for (const auto& o : outputs) os << "# output=" << o << '\n';
  return os.str();
}

}  // namespace fusedhs
