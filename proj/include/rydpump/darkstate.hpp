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

#include "rydpump/hamiltonians.hpp"
#include "rydpump/types.hpp"

namespace ryd {

// N x N hopping matrix of the single-excitation sector: off-diagonal J_ij,
// diagonal +delta_ls (edge entries -J at the dark resonance).
RMatrix hxy_matrix_n1(const EffectiveModel& model);

enum class DarkFamily { set1, set2 };

std::string to_string(DarkFamily f);

// set1: N = 4 + 6m, pattern {0,1,1,0,-1,-1,...}; set2: N = 6 + 10m, pattern {0,1,1,1,1,0,-1,...}.
std::vector<DarkFamily> families_for(int n_sites);
RVector family_pattern(DarkFamily family, int n_sites);
// Non-zero amplitude count 2 + 4m or 4 + 8m.
int family_k(DarkFamily family, int n_sites);

// Equal up to normalization and global sign.
bool matches_pattern(const RVector& v, const RVector& pattern, double tol = 1e-8);

struct DarkScanResult {
  RVector energies;
  RMatrix vectors;  // columns
  std::vector<RVector> dark_states;
  std::vector<double> dark_energies;
  std::vector<std::optional<DarkFamily>> dark_family;
  std::vector<double> dark_residuals;  // |H v - e v| / |H|
  double max_boundary_amplitude = 0.0;
  bool unique = false;
};

// Full eigendecomposition; within each degenerate cluster the combinations
// with vanishing reservoir amplitudes (|a_B| < threshold) are dark.
DarkScanResult find_dark_states(const RMatrix& h, const std::vector<int>& reservoir, double threshold = 1e-10);

enum class ReservoirRule { edges, zeros };

std::string to_string(ReservoirRule r);
ReservoirRule reservoir_rule_from_string(const std::string& s);

// edges: {0, N-1}. zeros: every zero of the family pattern.
std::vector<int> reservoir_for(ReservoirRule rule, int n_sites, std::optional<DarkFamily> family);

struct ScalingRow {
  int n = 0;
  double xi = 0.0;
  ReservoirRule rule = ReservoirRule::edges;
  std::optional<DarkFamily> family;
  int n_dark = 0;
  int k = 0;        // non-zero amplitudes of the dark state
  int k_model = 0;  // family count 2+4m / 4+8m
  int n_a = 0;
  double energy = 0.0;
  double delta = 0.0;
  int k_m = 0;
  bool pattern_match = false;
  std::vector<int> ambiguity_flags;
};

// One row per (N, family); N outside both families gives a row with n_dark = 0.
// Delta is taken on the non-reservoir sites, sign-gauged to |a_i| and
// embedded in order into the smallest power-of-two register.
std::vector<ScalingRow> scaling_scan(const std::vector<int>& n_list, double xi, ReservoirRule rule, int workers = 1);

struct TruncationReport {
  int n = 0;
  double xi = 0.0;
  double max_tail_ratio = 0.0;  // max |J_{i,i+x}| / |J_{i,i+1}|, x > 2
  double tail_sum_ratio = 0.0;  // max_i Sum_{x>2} |J_{i,i+x}| / min(|J_{i,i+1}|, |J_{i,i+2}|)
  double shift_ratio = 0.0;     // Delta_{i,i+3} / Delta_{i,i+1}
  bool negligible = true;       // tail_sum_ratio < 1e-2
};

TruncationReport truncation_error_report(const LatticeSpec& spec, const DriveConfig& drive);

}  // namespace ryd
