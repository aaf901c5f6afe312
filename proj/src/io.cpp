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

#include "rydpump/io.hpp"

#include <cmath>
#include <cstdio>

namespace ryd {

namespace {

constexpr const char* kBasisConvention = "bit i of the index is site i+1; set bit means |r>";

}  // namespace

json to_json(const QuantumState& state) {
  json j;
  j["basis"] = kBasisConvention;
  j["n_sites"] = state.n_sites();
  j["dim"] = state.dim();
  std::vector<double> data;
  if (state.kind() == QuantumState::Kind::pure) {
    j["kind"] = "pure";
    const CVector& psi = state.amplitudes();
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
      data.push_back(psi(k).real());
      data.push_back(psi(k).imag());
    }
  } else {
    j["kind"] = "mixed";
    const CMatrix& rho = state.matrix();
    for (Eigen::Index r = 0; r < rho.rows(); ++r)
      for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        data.push_back(rho(r, c).real());
        data.push_back(rho(r, c).imag());
      }
  }
  j["data"] = data;
  return j;
}

QuantumState state_from_json(const json& j) {
  const int n = j.at("n_sites").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  const auto data = j.at("data").get<std::vector<double>>();
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  if (kind == "pure") {
    if (static_cast<Eigen::Index>(data.size()) != 2 * d) throw ConfigError("data", "length must be 2 * 2^N");
    CVector psi(d);
    for (Eigen::Index k = 0; k < d; ++k) psi(k) = cplx(data[2 * k], data[2 * k + 1]);
    return QuantumState::pure(n, std::move(psi));
  }
  if (kind == "mixed") {
    if (static_cast<Eigen::Index>(data.size()) != 2 * d * d) throw ConfigError("data", "length must be 2 * 4^N");
    CMatrix rho(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        const auto k = r * d + c;
        rho(r, c) = cplx(data[2 * k], data[2 * k + 1]);
      }
    return QuantumState::mixed(n, std::move(rho));
  }
  throw ConfigError("kind", "expected pure or mixed");
}

json to_json(const EffectiveModel& model) {
  json j;
  j["n_sites"] = model.n_sites;
  j["truncation"] = to_string(model.truncation);
  j["h2_amp"] = model.h2_amp;
  j["j_scale"] = model.j_scale();
  j["omega"] = model.omega;
  j["delta"] = model.delta;
  j["delta_nn"] = model.delta_nn;
  json rows = json::array();
  for (Eigen::Index r = 0; r < model.j.rows(); ++r) {
    std::vector<double> row(model.j.cols());
    for (Eigen::Index c = 0; c < model.j.cols(); ++c) row[c] = model.j(r, c);
    rows.push_back(row);
  }
  j["j"] = rows;
  j["delta_ls"] = std::vector<double>(model.delta_ls.data(), model.delta_ls.data() + model.delta_ls.size());
  return j;
}

json to_json(const WitnessReport& report) {
  json j;
  j["delta"] = report.delta;
  j["y_c"] = report.y_c ? json(*report.y_c) : json(nullptr);
  j["y_c_defined"] = report.y_c.has_value();
  j["p0"] = report.p0;
  j["p1"] = report.p1;
  j["p_ge2"] = report.p_ge2;
  j["n_a"] = report.n_a;
  j["n_m"] = report.n_m;
  j["projector_expectations"] = report.projector_expectations;
  j["bounds"] = report.bounds;
  j["k_m"] = report.k_min;
  j["ambiguity_flags"] = report.ambiguity_flags;
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw ConfigError("output", "cannot open " + path.string());
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (filled_ >= columns_) throw ConfigError("csv", "row has more cells than the header");
  out_ << (filled_ ? "," : "") << v;
  ++filled_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw ConfigError("csv", "row has fewer cells than the header");
  out_ << '\n';
  filled_ = 0;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output", "cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace ryd
