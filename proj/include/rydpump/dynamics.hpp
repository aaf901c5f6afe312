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
#include <string>
#include <vector>

#include "rydpump/dissipation.hpp"
#include "rydpump/hamiltonians.hpp"
#include "rydpump/ode.hpp"
#include "rydpump/states.hpp"
#include "rydpump/types.hpp"

namespace ryd {

// Largest basis dimension integrated as a dense density matrix (2^8).
inline constexpr std::size_t kMasterDimLimit = 256;
// Largest basis dimension for the dense Liouvillian null-space method.
inline constexpr std::size_t kLiouvillianDimLimit = 32;

enum class Tier { full, effective };

std::string to_string(Tier t);
Tier tier_from_string(const std::string& s);

struct EvolutionProblem {
  BasisIndexer basis = BasisIndexer::single_excitation(1);
  SparseOp hamiltonian;
  std::vector<Jump> jumps;
  double t_final = 0.0;
  std::vector<double> sample_times;

  void validate() const;
};

// `count` evenly spaced times from 0 to t_final inclusive.
std::vector<double> uniform_samples(double t_final, int count);

// Full tier: the driven Rydberg Hamiltonian on all 2^N configurations. Effective tier: hopping
// model plus pair pump on {G} + {r_i} + {r_i r_{i+1}}.
EvolutionProblem make_problem(const LatticeSpec& spec, const DriveConfig& drive, Tier tier, Truncation truncation,
                              double t_final, std::vector<double> sample_times);

struct MasterResult {
  BasisIndexer basis = BasisIndexer::single_excitation(1);
  std::vector<double> times;
  std::vector<CMatrix> rho;  // in `basis`
  OdeStats stats;

  QuantumState state(std::size_t k) const { return QuantumState::from_sector(basis, rho[k]); }
};

// d rho / dt for the problem's generator.
CMatrix master_rhs(const EvolutionProblem& problem, const CMatrix& rho);

MasterResult evolve_master(const EvolutionProblem& problem, const QuantumState& rho0, const OdeOptions& opt = {});
MasterResult evolve_master(const EvolutionProblem& problem, const CMatrix& rho0, const OdeOptions& opt = {});

struct TrajectoryOptions {
  double dt = 0.01;
  int workers = 1;
  bool keep_states = true;
};

struct TrajectoryFailure {
  std::size_t index = 0;
  std::string message;
};

struct TrajectoryEnsemble {
  BasisIndexer basis = BasisIndexer::single_excitation(1);
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<std::vector<CVector>> states;  // [trajectory][sample], normalized
  std::vector<CMatrix> mean_rho;             // [sample]
  std::vector<long> jump_counts;             // [trajectory]
  std::vector<TrajectoryFailure> failures;
};

TrajectoryEnsemble evolve_trajectories(const EvolutionProblem& problem, const QuantumState& psi0, std::size_t n_traj,
                                       std::uint64_t seed, const TrajectoryOptions& opt = {});
TrajectoryEnsemble evolve_trajectories(const EvolutionProblem& problem, const CVector& psi0, std::size_t n_traj,
                                       std::uint64_t seed, const TrajectoryOptions& opt = {});

// Column-stacked superoperator: vec(A rho B) = (B^T kron A) vec(rho).
CMatrix liouvillian(const EvolutionProblem& problem);
std::vector<cplx> liouvillian_spectrum(const EvolutionProblem& problem);

struct SteadyStateResult {
  BasisIndexer basis = BasisIndexer::single_excitation(1);
  CMatrix rho;
  double smallest_singular = 0.0;
  double next_singular = 0.0;

  QuantumState state() const { return QuantumState::from_sector(basis, rho); }
};

// Kernel of the Liouvillian; throws NumericalError when it is degenerate.
SteadyStateResult steady_state(const EvolutionProblem& problem, double degeneracy_tol = 1e-10);

}  // namespace ryd
