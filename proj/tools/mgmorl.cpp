// mgmorl: train, sweep and synthesize data for the multi-microgrid
// multi-objective Q-learning engine.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mgmorl/commands.hpp"
#include "mgmorl/config.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> weights;
  std::optional<std::string> scalarization;
  std::optional<int> grid;
};

mgmorl::ObjectiveArray parse_weights(const std::string& text) {
  const auto fields = mgmorl::csv::split(text);
  if (fields.size() != mgmorl::kNumObjectives)
    throw mgmorl::ConfigError("--weights", "expected four comma-separated values w,s,g,a");
  mgmorl::ObjectiveArray w{};
  for (std::size_t n = 0; n < w.size(); ++n) {
    try {
      w[n] = mgmorl::csv::parse_double(fields[n], "--weights");
    } catch (const mgmorl::DataError& e) {
      throw mgmorl::ConfigError("--weights", e.what());
    }
  }
  return w;
}

/// Config file (or defaults) with command-line flags applied on top.
mgmorl::RunConfig resolve_config(const Overrides& o, bool seed_is_learner_seed) {
  mgmorl::RunConfig c = o.config_path.empty() ? mgmorl::RunConfig{} : mgmorl::load_config(o.config_path);
  if (o.out) c.output_dir = *o.out;
  if (o.seed && seed_is_learner_seed) c.learner.seed = *o.seed;
  if (o.weights) c.weights = parse_weights(*o.weights);
  if (o.scalarization) c.kind = *o.scalarization == "chebyshev" ? mgmorl::ScalarizationKind::chebyshev
                                                                : mgmorl::ScalarizationKind::linear;
  if (o.grid) c.grid = *o.grid;
  mgmorl::validate(c);
  return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "RNG seed (learner seed; data seed for synth)");
}

void add_learning(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--weights", o.weights, "objective weights w,s,g,a summing to 1");
  cmd->add_option("--scalarization", o.scalarization, "linear or chebyshev")
      ->check(CLI::IsMember({"linear", "chebyshev"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective Q-learning for multi-microgrid dynamic pricing"};
  app.require_subcommand(1);

  Overrides o;
  auto* train = app.add_subcommand("train", "train one policy and export its convergence log, policy and day trajectory");
  add_common(train, o);
  add_learning(train, o);

  auto* sweep = app.add_subcommand("sweep", "build the Pareto archive over a weight grid and flag the fair point");
  add_common(sweep, o);
  add_learning(sweep, o);
  sweep->add_option("--grid", o.grid, "weight-grid granularity H (C(H+3,3) runs)")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "write a synthetic time-series day");
  add_common(synth, o);

  auto* check = app.add_subcommand("validate-config", "validate a configuration and print the resolved document");
  add_common(check, o);
  add_learning(check, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (train->parsed()) {
      mgmorl::cmd_train(resolve_config(o, true), std::cout);
    } else if (sweep->parsed()) {
      mgmorl::cmd_sweep(resolve_config(o, true), std::cout);
    } else if (synth->parsed()) {
      auto c = resolve_config(o, false);
      mgmorl::cmd_synth(o.seed.value_or(c.synth_seed), c, std::cout);
    } else if (check->parsed()) {
      std::cout << mgmorl::to_json(resolve_config(o, true)).dump(2) << "\nconfiguration OK\n";
    }
  } catch (const mgmorl::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const mgmorl::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const mgmorl::DataError& e) {
    std::cerr << "invalid data: " << e.what() << "\n";
    return kExitValidation;
  } catch (const mgmorl::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
