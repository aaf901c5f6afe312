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

#include <optional>
#include <string>
#include <vector>

#include "rydpump/lattice.hpp"
#include "rydpump/states.hpp"
#include "rydpump/types.hpp"

namespace ryd {

// Laser and decay parameters in units of the reservoir decay rate.
struct DriveConfig {
  double omega = 1.0e3;
  std::optional<double> delta;  // defaults to half the nearest-neighbour shift
  double gamma_r = 1.0e-4;
  std::vector<double> gamma_site;
  std::vector<int> reservoir_sites;  // 0-based

  // Reservoir sites decay at `gamma`, all others at gamma_r.
  static DriveConfig with_reservoir(int n_sites, double omega, std::vector<int> reservoir, double gamma_r = 1.0e-4,
                                    double gamma = 1.0);

  double detuning(const LatticeSpec& spec) const;
  double linewidth() const { return power_broadened_linewidth(omega, gamma_r); }
  void validate(int n_sites) const;
};

// Lattice in blockade units for the given drive (cp = w_d).
LatticeSpec lattice_for_drive(int n_sites, double a0, double xi, const DriveConfig& drive, int p = 6);

enum class Truncation { full, next_nearest };

std::string to_string(Truncation t);
Truncation truncation_from_string(const std::string& s);

struct EffectiveModel {
  int n_sites = 0;
  RMatrix j;
  RVector delta_ls;
  double h2_amp = 0.0;
  Truncation truncation = Truncation::full;
  double omega = 0.0;
  double delta = 0.0;
  double delta_nn = 0.0;

  // 4 Omega^2 / Delta_nn
  double j_scale() const { return 2.0 * h2_amp; }
};

struct RydbergSpectrum {
  std::vector<double> v;                     // n = 0..N
  std::vector<double> anharmonicity;         // n = 0..N-2
  std::vector<double> two_photon_detuning;   // n = 0..N-2
  std::vector<double> two_photon_rabi;       // n = 0..N-2
  std::vector<double> two_photon_linewidth;  // n = 0..N-2
  std::vector<bool> blockaded;               // n = 0..N-2
};

// Sum_i (delta n_i + omega sigma_x^i) - Sum_{i<j} Delta_ij n_i n_j on the full basis.
SparseOp build_full_hamiltonian(const LatticeSpec& spec, const DriveConfig& drive);

// Omega^2/delta - Omega^2/(delta - Delta_ij)
double effective_j(const LatticeSpec& spec, const DriveConfig& drive, int i, int j);

// (2 Omega^2/Delta_nn)(1 - f_ij), f_ij = 1/(1 - Delta_ij/(Delta_nn/2)). Assumes delta = Delta_nn/2.
double effective_j_resonant_form(const LatticeSpec& spec, const DriveConfig& drive, int i, int j);

// Omega^2/delta - Sum_{j != i} Omega^2/(delta - Delta_ij); under next_nearest
// truncation pairs beyond |i-j| = 2 contribute Omega^2/delta.
double effective_light_shift(const LatticeSpec& spec, const DriveConfig& drive, int i,
                             Truncation truncation = Truncation::full);

// Closed-form light shift of the next-nearest model in units of J = 4 Omega^2/Delta_nn.
double light_shift_table(int n_sites, double xi, int p, int i);

EffectiveModel build_effective_model(const LatticeSpec& spec, const DriveConfig& drive, Truncation truncation);

// h2 (|r_i r_{i+1}><G| + h.c.) on every basis element present.
SparseOp build_h2_operator(const EffectiveModel& model, const BasisIndexer& basis);

// Hopping block (off-diagonal J, diagonal +delta_ls) on the n = 1 states plus H2.
SparseOp build_effective_hamiltonian(const EffectiveModel& model, const BasisIndexer& basis);

RydbergSpectrum rydberg_spectrum(const LatticeSpec& spec, const DriveConfig& drive);

}  // namespace ryd
