#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "stochmech/runner.hpp"

namespace stochmech::runner {

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  raise(ErrorCode::ConfigError, key + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) config_error(key, "cannot parse '" + text + "'");
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, trim(item)));
  if (out.empty()) config_error(key, "empty list");
  return out;
}

// Perturbation list: `count` specs sharing every field except the seed,
// which runs first_seed, first_seed + 1, ...
struct PerturbationTemplate {
  std::size_t count = 20;
  std::uint64_t first_seed = 1;
  PerturbationSpec spec;
};

using Setter = std::function<void(const std::string& key, const std::string& value)>;

std::map<std::string, Setter> setters(ExperimentConfig& c, PerturbationTemplate& p) {
  auto real = [](double& field) {
    return [&field](const std::string& k, const std::string& v) { field = parse_number<double>(k, v); };
  };
  auto count = [](std::size_t& field) {
    return [&field](const std::string& k, const std::string& v) { field = parse_number<std::size_t>(k, v); };
  };
  return {
      {"experiment", [&c](const std::string&, const std::string& v) { c.experiment = v; }},
      {"output_dir", [&c](const std::string&, const std::string& v) { c.output_dir = v; }},
      {"max_parallelism", count(c.max_parallelism)},
      {"grid.x_min", real(c.grid.x_min)},
      {"grid.x_max", real(c.grid.x_max)},
      {"grid.n_x", count(c.grid.n_x)},
      {"grid.n_t", count(c.grid.n_t)},
      {"grid.d", count(c.grid.d)},
      {"grid.boundary_tol", real(c.grid.boundary_tol)},
      {"packet.sigma0", real(c.packet.sigma0)},
      {"packet.mu0", real(c.packet.mu0)},
      {"packet.p", real(c.packet.p)},
      {"mc.N", count(c.mc.N)},
      {"mc.n", count(c.mc.n)},
      {"mc.substeps", count(c.mc.substeps)},
      {"mc.seed", [&c](const std::string& k, const std::string& v) { c.mc.seed = parse_number<std::uint64_t>(k, v); }},
      {"perturbations.count", count(p.count)},
      {"perturbations.seed", [&p](const std::string& k, const std::string& v) { p.first_seed = parse_number<std::uint64_t>(k, v); }},
      {"perturbations.support_lo", real(p.spec.support_lo)},
      {"perturbations.support_hi", real(p.spec.support_hi)},
      {"perturbations.window_lo", real(p.spec.window_lo)},
      {"perturbations.window_hi", real(p.spec.window_hi)},
      {"perturbations.amplitude", real(p.spec.amplitude)},
      {"perturbations.modes", count(p.spec.modes)},
      {"convergence.n_values", [&c](const std::string& k, const std::string& v) { c.convergence_n = parse_list<std::size_t>(k, v); }},
      {"convergence.check_from", count(c.convergence_check_from)},
      {"mixture.n", count(c.mixture_n)},
      {"mixture.drift", real(c.mixture_drift)},
      {"marginal.times", [&c](const std::string& k, const std::string& v) { c.marginal_times = parse_list<double>(k, v); }},
      {"marginal.l1_max", real(c.marginal_l1_max)},
      {"bb.pairs", count(c.bb_pairs)},
      {"theorem.base", [&c](const std::string&, const std::string& v) { c.theorem_base = v; }},
  };
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

const std::vector<std::string_view>& experiment_names() {
  static const std::vector<std::string_view> names{"gaussian-benchmark", "renormalization-convergence",
                                                   "theorem1-verify", "bb-compare", "marginal-check"};
  return names;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  PerturbationTemplate pert;
  const auto table = setters(config, pert);
  std::map<std::string, std::string> seen;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) config_error(key, "unknown key (line " + std::to_string(line_no) + ")");
    if (seen.contains(key)) config_error(key, "given twice");
    if (value.empty()) config_error(key, "missing value");
    it->second(key, value);
    seen[key] = value;
  }
  if (config.experiment.empty()) config_error("experiment", "missing");

  if (!seen.contains("perturbations.count") && config.experiment != "theorem1-verify") pert.count = 0;
  for (std::size_t i = 0; i < pert.count; ++i) {
    PerturbationSpec s = pert.spec;
    s.seed = pert.first_seed + i;
    config.perturbations.push_back(s);
  }

  std::string canonical;
  for (const auto& [k, v] : seen)
    if (k != "output_dir" && k != "max_parallelism") canonical += k + "=" + v + "\n";
  config.hash = fnv1a(canonical);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open config file " + path.string());
  return parse_config(in);
}

void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    config_error("experiment", "unknown experiment '" + c.experiment + "'");

  const GridSpec& g = c.grid;
  if (!(g.x_max > g.x_min)) config_error("grid.x_max", "must exceed grid.x_min");
  if (!is_power_of_two(g.n_x) || g.n_x < 8) config_error("grid.n_x", "must be a power of two >= 8");
  if (g.n_t < 4 || g.n_t % 2 != 0) config_error("grid.n_t", "must be even and >= 4");
  if (g.d != 1) config_error("grid.d", "only d = 1 is supported");
  if (!(g.boundary_tol > 0.0 && g.boundary_tol < 1.0)) config_error("grid.boundary_tol", "must lie in (0, 1)");
  g.validate();

  if (!(c.packet.sigma0 > 0.0)) config_error("packet.sigma0", "must be positive");
  if (!std::isfinite(c.packet.mu0)) config_error("packet.mu0", "must be finite");
  if (!std::isfinite(c.packet.p)) config_error("packet.p", "must be finite");

  if (c.mc.N < 2) config_error("mc.N", "need at least 2 trajectories");
  if (c.mc.n < 1) config_error("mc.n", "must be positive");
  if (c.mc.substeps < 1) config_error("mc.substeps", "must be positive");
  c.mc.validate();

  for (const auto& p : c.perturbations) {
    if (!(g.x_min < p.support_lo && p.support_lo < p.support_hi && p.support_hi < g.x_max))
      config_error("perturbations.support_lo", "support must lie strictly inside the box");
    if (!(0.0 < p.window_lo && p.window_lo < p.window_hi && p.window_hi < 1.0))
      config_error("perturbations.window_lo", "time window must lie strictly inside (0, 1)");
    if (!(p.amplitude >= 0.0 && p.amplitude < 1.0))
      config_error("perturbations.amplitude", "must lie in [0, 1); larger values make rho + y g negative");
    if (p.modes < 1) config_error("perturbations.modes", "must be positive");
  }

  for (std::size_t n : c.convergence_n)
    if (n < 1) config_error("convergence.n_values", "entries must be positive");
  if (c.mixture_n < 1) config_error("mixture.n", "must be positive");
  for (double t : c.marginal_times) {
    if (!(t >= 0.0 && t <= 1.0)) config_error("marginal.times", "entries must lie in [0, 1]");
    for (std::size_t n : {c.mc.n, g.n_t}) {
      const double node = t * static_cast<double>(n);
      if (std::abs(node - std::round(node)) > 1e-9)
        config_error("marginal.times", "entry " + format_double(t) + " is not a node of a partition with " +
                                           std::to_string(n) + " intervals");
    }
  }
  if (!(c.marginal_l1_max > 0.0)) config_error("marginal.l1_max", "must be positive");
  if (c.theorem_base != "schrodinger" && c.theorem_base != "mismatched")
    config_error("theorem.base", "must be 'schrodinger' or 'mismatched'");
}

}  // namespace stochmech::runner
