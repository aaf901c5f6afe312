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

#include "rydpump/hamiltonians.hpp"
#include "rydpump/states.hpp"
#include "rydpump/types.hpp"

namespace ryd {

// Jump |g><r| on `site`, entering as rate * (L rho L^+ - {L^+ L, rho}/2).
struct Jump {
  double rate = 0.0;
  int site = 0;
  SparseOp op;
};

std::vector<Jump> lindblad_jumps(const DriveConfig& drive, const BasisIndexer& basis);

// Sum_k rate_k (L rho L^+ - {L^+ L, rho}/2)
CMatrix lindblad_dissipator(const std::vector<Jump>& jumps, const CMatrix& rho);

// Dressing of |r> by a short-lived |e>; rates in units of the bare Rydberg decay.
struct DressingConfig {
  double omega_d = 0.0;
  double delta_d = 0.0;
  double gamma_e = 1.0e4;
  double gamma_r = 1.0;

  void validate() const;
};

// Gamma = 2 (gamma_r + gamma_e |Omega_d|^2 / (Delta_d^2 + gamma_e^2)) with gamma_x = Gamma_x / 2.
double effective_decay_rate(const DressingConfig& cfg);

struct BlochSample {
  double t = 0.0;
  cplx sigma_ge;
  cplx sigma_gr;
  double population = 0.0;  // |sigma_gr|^2
};

// Fixed-step RK4 from sigma_gr = 1, sigma_ge = 0. Samples every `sample_every` steps.
std::vector<BlochSample> integrate_bloch(const DressingConfig& cfg, double t_final, double dt, int sample_every = 1);

// Least-squares slope of -log|sigma_gr|^2 against t.
double fit_decay_rate(const std::vector<BlochSample>& samples);

}  // namespace ryd
