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

#include "rydpump/lattice.hpp"

#include <cmath>
#include <string>

namespace ryd {

void LatticeSpec::validate() const {
  if (n_sites < 2) throw GeometryError("lattice.n_sites", "need at least 2 sites");
  if (!(a0 > 0.0)) throw GeometryError("lattice.a0", "must be positive");
  if (!(xi > 0.0) || !(xi < 2.0)) {
    throw GeometryError("lattice.xi", "must lie in (0, 2), got " + std::to_string(xi));
  }
  if (p < 1) throw GeometryError("lattice.p", "exponent must be >= 1");
  if (!(cp > 0.0)) throw GeometryError("lattice.cp", "must be positive");
}

LatticeSpec LatticeSpec::in_blockade_units(int n_sites, double a0, double xi, double w_d, int p) {
  LatticeSpec spec{n_sites, a0, xi, p, w_d};
  spec.validate();
  return spec;
}

double power_broadened_linewidth(double omega, double gamma_r) {
  return std::sqrt(gamma_r * gamma_r / 4.0 + 2.0 * omega * omega);
}

double blockade_radius(double cp, double w_d, int p) {
  if (!(cp > 0.0) || !(w_d > 0.0) || p < 1) {
    throw ConfigError("", "blockade_radius needs positive cp, w_d and p");
  }
  return std::pow(cp / w_d, 1.0 / p);
}

std::vector<Position> build_positions(const LatticeSpec& spec) {
  spec.validate();
  const double a1 = spec.xi * spec.a0;
  const double cos_t = spec.xi / 2.0;
  const double sin_t = std::sqrt(1.0 - cos_t * cos_t);
  std::vector<Position> out(spec.n_sites);
  for (int i = 0; i < spec.n_sites; ++i) {
    const double base = (i / 2) * a1;
    if (i % 2 == 0) {
      out[i] = {base, 0.0};
    } else {
      out[i] = {base + spec.a0 * cos_t, spec.a0 * sin_t};
    }
  }
  return out;
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

void check_pair(const LatticeSpec& spec, int i, int j) {
  if (i < 0 || j < 0 || i >= spec.n_sites || j >= spec.n_sites) {
    throw ConfigError("site", "index out of range");
  }
  if (i == j) throw ConfigError("site", "self-interaction is undefined");
}

}  // namespace

double pair_shift(const LatticeSpec& spec, int i, int j) {
  check_pair(spec, i, j);
  const auto pos = build_positions(spec);
  return spec.cp * std::pow(distance(pos[i], pos[j]), -spec.p);
}

double nearest_neighbor_shift(const LatticeSpec& spec) { return spec.cp * std::pow(spec.a0, -spec.p); }

PairShiftTable::PairShiftTable(const LatticeSpec& spec) : shifts_(RMatrix::Zero(spec.n_sites, spec.n_sites)) {
  const auto pos = build_positions(spec);
  for (int i = 0; i < spec.n_sites; ++i) {
    for (int j = i + 1; j < spec.n_sites; ++j) {
      const double v = spec.cp * std::pow(distance(pos[i], pos[j]), -spec.p);
      shifts_(i, j) = v;
      shifts_(j, i) = v;
    }
  }
}

}  // namespace ryd
