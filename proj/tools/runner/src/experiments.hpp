#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochmech/runner.hpp"

namespace stochmech::runner {

using Json = nlohmann::ordered_json;

struct Context {
  const ExperimentConfig& config;
  std::filesystem::path dir;
  Json results = Json::object();
  std::vector<CheckResult> checks;

  void check(std::string name, bool passed, std::string detail);
  std::filesystem::path file(const std::string& name) const { return dir / name; }
};

void gaussian_benchmark(Context& ctx);
void renormalization_convergence(Context& ctx);
void theorem1_verify(Context& ctx);
void bb_compare(Context& ctx);
void marginal_check(Context& ctx);

}  // namespace stochmech::runner
