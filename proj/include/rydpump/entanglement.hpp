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
#include <vector>

#include "rydpump/states.hpp"
#include "rydpump/types.hpp"

namespace ryd {

// <psi| rho |psi>; caller reduces to the target's register first.
double fidelity(const QuantumState& state, const QuantumState& target);

// Wootters concurrence of a two-qubit density matrix.
double concurrence(const CMatrix& rho2);

// Real Walsh basis of the single-excitation sector of 2^m sites. Row i holds
// the site amplitudes of |W_i>; index b*2^(m-1) + i is the (+,-) branch b of
// the previous level's vector i, so row 0 is the symmetric W state.
class WProjectorBasis {
 public:
  explicit WProjectorBasis(int m);

  int depth() const { return m_; }
  int register_size() const { return n_m_; }
  const RMatrix& vectors() const { return vectors_; }

  // |W_i><W_i| on the full 2^N_m register (N_m <= kDenseSiteLimit).
  CMatrix projector(int i) const;

 private:
  int m_;
  int n_m_;
  RMatrix vectors_;
};

WProjectorBasis build_w_basis(int m);

// Smallest m >= 1 with 2^m >= n_a.
int register_depth_for(int n_a);

// In-place fast Walsh-Hadamard transform (unnormalized); size must be a power of two.
template <class Vec>
void walsh_hadamard(Vec& v) {
  const auto n = v.size();
  for (decltype(v.size()) len = 1; len < n; len <<= 1) {
    for (decltype(v.size()) i = 0; i < n; i += len << 1) {
      for (decltype(v.size()) j = i; j < i + len; ++j) {
        const auto a = v[j];
        const auto b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

struct WitnessReport {
  double delta = 0.0;
  std::optional<double> y_c;  // empty when p1 = 0
  // <Pi_i> in the normalized single-excitation block.
  std::vector<double> projector_expectations;
  double p0 = 0.0;
  double p1 = 0.0;
  double p_ge2 = 0.0;
  int n_a = 0;
  int n_m = 0;
  std::vector<double> bounds;  // Delta_b^(s) for s = 1..N_m
  int k_min = 1;
  std::vector<int> ambiguity_flags;  // s with Delta_b^(s) < Delta_b^(s+1)
};

// Delta and y_c of a state over the probed register A (N_A <= N_m); site j
// of A sits at register site j and the remaining register sites are empty.
WitnessReport witness(const QuantumState& state, const WProjectorBasis& basis);
WitnessReport witness(const SingleExcitationState& state, const WProjectorBasis& basis);

// Delta of a pure single-excitation amplitude vector over the register.
double delta_of_amplitudes(const CVector& site_amplitudes, const WProjectorBasis& basis);

// Minimum Delta over s-producible test states at the given y_c.
double bound_delta(int k_minus_1, const WProjectorBasis& basis, double y_c);

// Minimum Delta over balanced s-site W states (y_c = 0).
double bound_delta_pure(int k_minus_1, int n_m);

// Lower convex, non-increasing envelope in the (y_c, Delta) plane.
struct BoundaryCurve {
  std::vector<double> y;
  std::vector<double> delta;

  double at(double y_c) const;
};

// Memoized boundary for s-producible states on an N_m register.
const BoundaryCurve& boundary_curve(int n_m, int k_minus_1, int grid = 200);

// Fills report.bounds at report.y_c.
void attach_bounds(WitnessReport& report, const WProjectorBasis& basis);

// Conservative depth: k_m = 1 + largest t with Delta < Delta_b^(s) for all s <= t,
// capped at N_A. Sets ambiguity_flags.
int certify_depth(WitnessReport& report);

// witness + attach_bounds + certify_depth.
WitnessReport certify(const QuantumState& state, const WProjectorBasis& basis);
WitnessReport certify(const SingleExcitationState& state, const WProjectorBasis& basis);

// Earliest sample time from which Delta stays below Delta_b^(s)(y_c) for the
// rest of the series; empty when the series never settles below the bound.
std::optional<double> stable_crossing_time(const std::vector<double>& times, const std::vector<double>& delta,
                                           const std::vector<std::optional<double>>& y_c, int k_minus_1,
                                           const WProjectorBasis& basis);

struct VarianceBound {
  int register_size = 0;
  double mean_coherence = 0.0;  // (2/(N(N-1))) Sum_{i<j} |d_ij|
  double coherence_form = 0.0;  // ((N-1)/N)(1 - X^2), X = (2/(N-1)) Sum |d_ij|
  double transverse_form = 0.0;
  double delta = 0.0;
  bool holds = false;  // delta <= coherence_form
};

// Coherences d_ij of the normalized single-excitation block, padded to the
// W register of the state.
VarianceBound variance_bound(const QuantumState& state);
VarianceBound variance_bound(const SingleExcitationState& state);

}  // namespace ryd
