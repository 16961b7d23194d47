#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "experiments.hpp"

namespace stochmech::runner {

namespace {

std::string hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

bool RunResult::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

RunResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::filesystem::path dir = config.output_dir;
  if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) dir = env;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());

#ifdef _OPENMP
  if (config.max_parallelism > 0) omp_set_num_threads(static_cast<int>(config.max_parallelism));
#endif

  Context ctx{config, dir, Json::object(), {}};
  const auto& e = config.experiment;
  try {
    if (e == "gaussian-benchmark") gaussian_benchmark(ctx);
    else if (e == "renormalization-convergence") renormalization_convergence(ctx);
    else if (e == "theorem1-verify") theorem1_verify(ctx);
    else if (e == "bb-compare") bb_compare(ctx);
    else if (e == "marginal-check") marginal_check(ctx);
  } catch (const Error& err) {
    raise(err.code(), e + ": " + err.what());
  }

  RunResult result{std::move(ctx.checks), dir};
  Json checks = Json::array();
  for (const auto& c : result.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  Json summary = {{"experiment", e},
                  {"config_hash", hex(config.hash)},
                  {"seed", config.mc.seed},
                  {"grid", {{"x_min", config.grid.x_min}, {"x_max", config.grid.x_max}, {"n_x", config.grid.n_x},
                            {"n_t", config.grid.n_t}, {"d", config.grid.d}}},
                  {"packet", {{"sigma0", config.packet.sigma0}, {"mu0", config.packet.mu0}, {"p", config.packet.p}}},
                  {"passed", result.passed()},
                  {"checks", checks},
                  {"results", ctx.results}};
  write_json(dir / "summary.json", summary);

  Json manifest = {{"experiment", e},
                   {"config_hash", hex(config.hash)},
                   {"seed", config.mc.seed},
                   {"version", STOCHMECH_VERSION},
                   {"compiler", __VERSION__},
                   {"timestamp", utc_timestamp()}};
  write_json(dir / "manifest.json", manifest);
  return result;
}

int run_command(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    const auto config = load_config(config_path);
    const auto result = run_experiment(config);
    for (const auto& c : result.checks)
      out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    out << "wrote " << (result.output_dir / "summary.json").string() << '\n';
    return result.passed() ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int validate_command(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    validate(load_config(config_path));
    out << config_path.string() << ": ok\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace stochmech::runner
