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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydpump/darkstate.hpp"
#include "rydpump/entanglement.hpp"
#include "rydpump/hamiltonians.hpp"
#include "rydpump/states.hpp"

namespace ryd {

using json = nlohmann::json;

// {"basis": ..., "n_sites", "kind", "dim", "data": [re, im, ...]}; matrices row-major.
json to_json(const QuantumState& state);
QuantumState state_from_json(const json& j);

json to_json(const EffectiveModel& model);
json to_json(const WitnessReport& report);

// Round-trippable decimal form with 17 significant digits; "nan" / "inf" otherwise.
std::string format_double(double v);

// Comma-separated table with a fixed header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace ryd
