// Copyright 2026 The Activesense Authors
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

#include <iostream>

#include "CLI11.hpp"
#include "activesense/cli.hpp"

int main(int argc, char** argv) {
  using namespace activesense;
  CLI::App app{"Active camera view planning simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig run;
  std::optional<std::uint64_t> run_seed;
  auto* run_cmd = app.add_subcommand("run", "Simulate one policy on a scenario");
  run_cmd->add_option("--scenario", run.scenario_path, "Scenario JSON file")->required();
  run_cmd->add_option("--policy", run.policy, "fixed, tcp or cease")->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", run_seed, "Override the scenario seed");
  run_cmd->add_flag("--trace", run.trace, "Also write safe-region depths and planner traces");

  std::string cmp_scenario, cmp_policies = "fixed,tcp,cease", cmp_out;
  std::optional<std::uint64_t> cmp_seed;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several policies and tabulate coverage");
  cmp_cmd->add_option("--scenario", cmp_scenario, "Scenario JSON file")->required();
  cmp_cmd->add_option("--policies", cmp_policies, "Comma-separated policies");
  cmp_cmd->add_option("--out", cmp_out, "Output directory")->required();
  cmp_cmd->add_option("--seed", cmp_seed, "Override the scenario seed");

  std::string val_scenario;
  auto* val_cmd = app.add_subcommand("validate", "Check a scenario file against the schema");
  val_cmd->add_option("--scenario", val_scenario, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*run_cmd) {
      run.seed = run_seed;
      return cmd_run(run, std::cout, std::cerr);
    }
    if (*cmp_cmd) {
      return cmd_compare(cmp_scenario, split_policies(cmp_policies), cmp_out, cmp_seed,
                         std::cout, std::cerr);
    }
    return cmd_validate(val_scenario, std::cout, std::cerr);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
