// Copyright 2026 The rydpump Authors
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

#include <CLI11.hpp>

#include "rydpump/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dissipative preparation of W-type entanglement in Rydberg lattices"};
  app.set_version_flag("--version", ryd::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string tier;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out,-o", out, "Output directory");
    sub->add_option("--seed", seed, "Trajectory seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tier", tier, "Model tier")->check(CLI::IsMember({"full", "effective"}));
  };

  for (const auto& name : ryd::scenario_names()) add_common(app.add_subcommand(name, "Run the " + name + " scenario"));
  CLI::App* validate = app.add_subcommand("validate", "Validate a configuration and print its normalized form");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  ryd::RunOverrides ov;
  const bool validate_only = sub == validate;
  if (!validate_only) ov.scenario = sub->get_name();
  if (!sub->get_option("--out")->empty()) ov.output = out;
  if (!sub->get_option("--seed")->empty()) ov.seed = seed;
  if (!sub->get_option("--workers")->empty()) ov.workers = workers;
  if (!sub->get_option("--tier")->empty()) ov.tier = ryd::tier_from_string(tier);
  return ryd::run_cli(config, ov, validate_only, std::cout, std::cerr);
}
