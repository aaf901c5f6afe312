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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rydpump/darkstate.hpp"
#include "rydpump/dynamics.hpp"
#include "rydpump/io.hpp"

namespace ryd {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

const std::vector<std::string>& scenario_names();

struct FieldError {
  std::string field;
  std::string message;
};

class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }
  json to_json() const;

 private:
  std::vector<FieldError> errors_;
};

// Fully resolved scenario. Site lists are 0-based here and 1-based in files.
struct ScenarioConfig {
  std::string scenario;
  std::filesystem::path output = "out";

  int n_sites = 0;
  double a0 = 0.0;
  double xi = 0.0;
  int p = 6;

  DriveConfig drive;
  double gamma_reservoir = 1.0;

  Tier tier = Tier::effective;
  Truncation truncation = Truncation::full;
  double t_final = 0.0;
  int samples = 201;
  std::size_t n_traj = 500;
  std::uint64_t seed = 1;
  double dt = 0.01;
  int workers = 1;
  std::vector<int> initial_excited;

  std::vector<int> probe_sites;
  int grid = 200;

  std::vector<int> n_list;
  std::vector<double> xi_list;
  std::vector<double> a0_list;
  std::vector<ReservoirRule> rules;

  DressingConfig dressing;
  double bloch_t_final = 0.0;
  double bloch_dt = 0.0;

  json normalized;
};

struct RunOverrides {
  std::optional<std::string> scenario;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<Tier> tier;
};

// Throws ConfigValidationError listing every violated constraint.
ScenarioConfig validate_config(const json& raw, const RunOverrides& overrides = {});
ScenarioConfig validate_config_file(const std::filesystem::path& path, const RunOverrides& overrides = {});

// Worker count from RYD_WORKERS, else the hardware concurrency.
int default_workers();

// Runs the scenario, writing outputs and manifest.json under cfg.output.
void run_scenario(const ScenarioConfig& cfg, std::ostream& log);

// Runs a scenario from a config file and maps errors onto exit codes; error
// reports go to `err` as JSON.
int run_cli(const std::filesystem::path& config, const RunOverrides& overrides, bool validate_only, std::ostream& out,
            std::ostream& err);

}  // namespace ryd
