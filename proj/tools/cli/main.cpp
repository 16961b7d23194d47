#include <iostream>

#include <CLI11.hpp>

#include <stochmech/runner.hpp>

int main(int argc, char** argv) {
  CLI::App app{"stochmech: stochastic-mechanics experiments"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config, "config file")->required();
  auto* validate = app.add_subcommand("validate", "parse and check a config file without running it");
  validate->add_option("config", config, "config file")->required();
  auto* list = app.add_subcommand("list-experiments", "print the experiment names");

  CLI11_PARSE(app, argc, argv);

  if (*run) return stochmech::runner::run_command(config, std::cout, std::cerr);
  if (*validate) return stochmech::runner::validate_command(config, std::cout, std::cerr);
  if (*list) {
    for (auto name : stochmech::runner::experiment_names()) std::cout << name << '\n';
    return 0;
  }
  return 1;
}
