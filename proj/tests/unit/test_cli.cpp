#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>
#include <stochmech/runner.hpp>

namespace fs = std::filesystem;
using namespace stochmech::runner;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("stochmech_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path;
  }

  struct Outcome {
    int code;
    std::string out, err;
  };
  Outcome run(const fs::path& cfg) {
    std::ostringstream out, err;
    const int code = run_command(cfg, out, err);
    return {code, out.str(), err.str()};
  }
  Outcome check(const fs::path& cfg) {
    std::ostringstream out, err;
    const int code = validate_command(cfg, out, err);
    return {code, out.str(), err.str()};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

std::string bb_config(const fs::path& out) {
  return "experiment = bb-compare\noutput_dir = " + out.string() + "\npacket.p = 1.25\nbb.pairs = 3\n";
}

}  // namespace

TEST_F(Cli, MissingConfigNamesPath) {
  const auto r = run(dir_ / "nope.cfg");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.cfg"), std::string::npos);
}

TEST_F(Cli, ShippedConfigsValidate) {
  for (const auto& entry : fs::directory_iterator(STOCHMECH_CONFIG_DIR)) {
    const auto r = check(entry.path());
    EXPECT_EQ(r.code, 0) << entry.path() << ": " << r.err;
  }
}

TEST_F(Cli, NonPowerOfTwoGrid) {
  const auto r = check(write("c.cfg", "experiment = bb-compare\ngrid.n_x = 500\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("grid.n_x"), std::string::npos) << r.err;
}

TEST_F(Cli, NegativeDensityAmplitude) {
  const auto r = check(write("c.cfg", "experiment = theorem1-verify\nperturbations.amplitude = 1.2\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("perturbations.amplitude"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownAndDuplicateKeys) {
  auto r = check(write("a.cfg", "experiment = bb-compare\nmc.M = 3\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("mc.M"), std::string::npos);
  r = check(write("b.cfg", "experiment = bb-compare\nmc.N = 3\nmc.N = 4\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("mc.N"), std::string::npos);
  r = check(write("c.cfg", "experiment = bb-compare\nmc.N = lots\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("mc.N"), std::string::npos);
  r = check(write("d.cfg", "experiment = everything\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("experiment"), std::string::npos);
}

TEST_F(Cli, HashIgnoresFormattingAndOutputDir) {
  std::istringstream a("experiment = bb-compare\n# comment\nmc.seed=5\noutput_dir = x\n");
  std::istringstream b("mc.seed = 5\n\nexperiment=bb-compare   \noutput_dir = y\n");
  std::istringstream c("experiment = bb-compare\nmc.seed = 6\n");
  const auto ha = parse_config(a).hash;
  EXPECT_EQ(ha, parse_config(b).hash);
  EXPECT_NE(ha, parse_config(c).hash);
}

TEST_F(Cli, EmptyTheoremRunIsVacuousPass) {
  const auto out = dir_ / "out";
  const auto r = run(write("t.cfg", "experiment = theorem1-verify\nperturbations.count = 0\noutput_dir = " + out.string() + "\n"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["results"]["counts"]["specs"], 0);
  EXPECT_TRUE(summary["passed"].get<bool>());
}

TEST_F(Cli, SummaryIsDeterministic) {
  const auto a = run(write("a.cfg", bb_config(dir_ / "a")));
  const auto b = run(write("b.cfg", bb_config(dir_ / "b")));
  ASSERT_EQ(a.code, 0) << a.out << a.err;
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "summary.json"), slurp(dir_ / "b" / "summary.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "a" / "manifest.json"));
  for (const char* key : {"config_hash", "seed", "version", "timestamp"}) EXPECT_TRUE(manifest.contains(key)) << key;
  EXPECT_TRUE(fs::exists(dir_ / "a" / "transport_map.csv"));
}

TEST_F(Cli, OutputDirFromEnvironment) {
  const auto target = dir_ / "from_env";
  ::setenv("OUTPUT_DIR", target.c_str(), 1);
  const auto r = run(write("a.cfg", bb_config(dir_ / "ignored")));
  ::unsetenv("OUTPUT_DIR");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(target / "summary.json"));
  EXPECT_FALSE(fs::exists(dir_ / "ignored"));
}

TEST_F(Cli, FailedCheckExitsTwo) {
  // No finite ensemble meets a 1e-4 L1 bound.
  const auto r = run(write("a.cfg", "experiment = marginal-check\noutput_dir = " + (dir_ / "o").string() +
                                        "\nmc.N = 1000\nmarginal.l1_max = 1e-4\n"));
  EXPECT_EQ(r.code, 2) << r.out << r.err;
  EXPECT_NE(r.out.find("[FAIL]"), std::string::npos);
}

TEST_F(Cli, ModuleErrorsCarryExperimentName) {
  const auto r = run(write("a.cfg", "experiment = bb-compare\noutput_dir = " + (dir_ / "o").string() +
                                        "\npacket.mu0 = 9\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bb-compare"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("BoundaryLeak"), std::string::npos) << r.err;
}

TEST_F(Cli, BinaryListsExperiments) {
  const auto out = dir_ / "list.txt";
  const std::string cmd = std::string(STOCHMECH_CLI_PATH) + " list-experiments > " + out.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const auto text = slurp(out);
  for (auto name : experiment_names()) EXPECT_NE(text.find(name), std::string::npos) << name;
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string cli = STOCHMECH_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " validate " + (dir_ / "missing.cfg").string() + " 2>/dev/null").c_str())), 1);
  const auto cfg = write("v.cfg", "experiment = marginal-check\n");
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " validate " + cfg.string() + " >/dev/null").c_str())), 0);
}

TEST_F(Cli, GaussianBenchmarkDefaultConfigPasses) {
  ::setenv("OUTPUT_DIR", (dir_ / "gb").c_str(), 1);
  const auto r = run(fs::path(STOCHMECH_CONFIG_DIR) / "gaussian-benchmark.cfg");
  ::unsetenv("OUTPUT_DIR");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto summary = nlohmann::json::parse(slurp(dir_ / "gb" / "summary.json"));
  const auto& f = summary["results"]["functionals"];
  for (const char* key : {"quantum", "classical", "drift"}) EXPECT_TRUE(f.contains(key)) << key;
  EXPECT_TRUE(summary["results"]["monte_carlo"].contains("renormalized"));
  EXPECT_EQ(f["quantum"]["provenance"], "schrodinger-derived");
}
