// doi: fit, simulate and benchmark driver.
//
//   doi fit --config run.json [--seed S] [--out DIR] [--threads T]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "doi/report.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration")->required();
  sub->add_option("--seed", o.seed, "override the master seed");
  sub->add_option("--out", o.out, "override the output directory");
  sub->add_option("--threads", o.threads, "worker threads for benchmark replicates")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian causal inference under unknown network interference"};
  app.require_subcommand(1);
  Overrides o;
  auto* fit = app.add_subcommand("fit", "fit the DoI model to a dataset and summarize estimands");
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset with known effects");
  auto* bench = app.add_subcommand("benchmark", "run the simulation benchmark grid");
  for (auto* s : {fit, sim, bench}) add_common(s, o);
  app.add_flag_callback("--version", [] {
    std::cout << "doi " << doi::kVersion << '\n';
    std::exit(0);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  doi::RunConfig cfg;
  try {
    cfg = doi::parse_config(o.config);
    const std::string expected = app.get_subcommands().front()->get_name();
    if (doi::RunConfig::command_name(cfg.command) != expected)
      throw doi::ConfigError("config command is \"" + doi::RunConfig::command_name(cfg.command) +
                             "\" but the subcommand is \"" + expected + "\"");
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.out = *o.out;
    if (o.threads) cfg.threads = *o.threads;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    doi::execute(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
