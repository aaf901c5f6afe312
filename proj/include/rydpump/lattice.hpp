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

#include <vector>

#include "rydpump/types.hpp"

namespace ryd {

// Staggered triangular chain. Lengths in units of the blockade radius d_B,
// energies in units of the reservoir decay rate.
struct LatticeSpec {
  int n_sites = 2;
  double a0 = 1.0;
  double xi = 1.0;
  int p = 6;
  double cp = 1.0;

  // Throws GeometryError / ConfigError.
  void validate() const;

  // cp = w_d so that the pair shift at distance d_B equals w_d.
  static LatticeSpec in_blockade_units(int n_sites, double a0, double xi, double w_d, int p = 6);
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

// sqrt(gamma_r^2/4 + 2 omega^2)
double power_broadened_linewidth(double omega, double gamma_r);

double blockade_radius(double cp, double w_d, int p);

// Even 0-based sites sit on the lower row at spacing a1 = xi*a0; odd sites are
// offset by (a0*xi/2, a0*sin(theta)) with cos(theta) = xi/2.
std::vector<Position> build_positions(const LatticeSpec& spec);

double distance(const Position& a, const Position& b);

// cp * |x_i - x_j|^-p, 0-based indices.
double pair_shift(const LatticeSpec& spec, int i, int j);

// cp * a0^-p
double nearest_neighbor_shift(const LatticeSpec& spec);

class PairShiftTable {
 public:
  explicit PairShiftTable(const LatticeSpec& spec);

  int n_sites() const { return static_cast<int>(shifts_.rows()); }
  double operator()(int i, int j) const { return shifts_(i, j); }
  const RMatrix& matrix() const { return shifts_; }

 private:
  RMatrix shifts_;
};

}  // namespace ryd
