// Copyright 2026 The qconsensus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qconsensus: run one experiment and write its CSV / JSON artifacts.
//
//   qconsensus <experiment> [--config FILE] [--seed N] [--dt X] [--t-max X]
//                           [--out DIR] [--set key=value]... [--print-config]
//
// On failure prints {"error": kind, "message": ...} to stderr and exits
// nonzero (2 for config errors, 1 otherwise).

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qconsensus/error.hpp"
#include "qconsensus/experiments.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
  return code;
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<std::string> out;
  std::vector<std::string> sets;
  bool print_config = false;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace qconsensus;
  CLI::App app{"Partial quantum consensus experiments"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& name : ExperimentConfig::experiments()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", flags.config, "key = value config file");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--dt", flags.dt, "integrator step");
    sub->add_option("--t-max", flags.t_max, "horizon");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--set", flags.sets, "override any config key (key=value)");
    sub->add_flag("--print-config", flags.print_config, "print the resolved config and exit");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig cfg = ExperimentConfig::defaults_for(experiment);
    if (!flags.config.empty()) {
      cfg = load_config(flags.config, experiment);
      if (cfg.experiment != experiment) {
        throw Error(ErrorKind::kConfig, "config file is for '" + cfg.experiment +
                                            "', not '" + experiment + "'");
      }
    }
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.dt) cfg.set("dt", CLI::detail::to_string(*flags.dt));
    if (flags.t_max) cfg.set("t_max", CLI::detail::to_string(*flags.t_max));
    if (flags.out) cfg.out = *flags.out;
    for (const auto& kv : flags.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::kConfig, "--set expects key=value");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    if (flags.print_config) {
      std::cout << cfg.to_text();
      return 0;
    }
    const ExperimentOutput out = run_experiment(cfg);
    write_output(cfg, out);
    std::cout << out.summary.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    return fail(std::string(to_string(e.kind())), e.what(), e.kind() == ErrorKind::kConfig ? 2 : 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}
