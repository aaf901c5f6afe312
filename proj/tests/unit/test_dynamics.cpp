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

#include <doctest.h>

#include "oracle.hpp"
#include "rydpump/dynamics.hpp"
#include "rydpump/entanglement.hpp"

using namespace ryd;

namespace {

EvolutionProblem single_atom(double omega, double gamma, double t_final, int samples) {
  EvolutionProblem p;
  p.basis = BasisIndexer::full(1);
  std::vector<Triplet> t;
  if (omega != 0.0) t = {{0, 1, cplx(omega)}, {1, 0, cplx(omega)}};
  p.hamiltonian = SparseOp(2, 2);
  p.hamiltonian.setFromTriplets(t.begin(), t.end());
  if (gamma > 0.0) p.jumps = lindblad_jumps(DriveConfig::with_reservoir(1, 1.0, {0}, 1e-4, gamma), p.basis);
  p.t_final = t_final;
  p.sample_times = uniform_samples(t_final, samples);
  return p;
}

EvolutionProblem chain(int n, double a0, double t_final, int samples, Tier tier = Tier::effective) {
  const DriveConfig d = DriveConfig::with_reservoir(n, 1e3, {0, n - 1});
  return make_problem(lattice_for_drive(n, a0, oracle::sixth_root_of_three(), d), d, tier, Truncation::full, t_final,
                      uniform_samples(t_final, samples));
}

CMatrix ground_rho(std::size_t d) {
  CMatrix r = CMatrix::Zero(d, d);
  r(0, 0) = 1.0;
  return r;
}

}  // namespace

TEST_CASE("master equation analytic cases") {
  const auto decay = single_atom(0.0, 1.0, 5.0, 11);
  const MasterResult r = evolve_master(decay, QuantumState::basis_state(1, 1));
  for (std::size_t k = 0; k < r.times.size(); ++k) CHECK(std::abs(r.rho[k](1, 1).real() - std::exp(-r.times[k])) < 1e-7);

  const auto rabi = single_atom(2.0, 0.0, 3.0, 31);
  const MasterResult q = evolve_master(rabi, QuantumState::ground(1));
  for (std::size_t k = 0; k < q.times.size(); ++k) {
    const double s = std::sin(2.0 * q.times[k]);
    CHECK(std::abs(q.rho[k](1, 1).real() - s * s) < 1e-7);
  }
}

TEST_CASE("master equation on the pumped chain stays physical") {
  const auto p = chain(4, 0.26, 200.0, 41);
  const MasterResult r = evolve_master(p, ground_rho(p.basis.dim()));
  for (const auto& rho : r.rho) {
    const Physicality ph = physicality(rho);
    CHECK(ph.trace_error < 1e-9);
    CHECK(ph.hermiticity_error < 1e-9);
    CHECK(ph.min_eigenvalue > -1e-7);
  }
  const QuantumState red = partial_trace(r.state(r.rho.size() - 1), {1, 2});
  CHECK(fidelity(red, make_w_state(2, {0, 1})) >= 0.99);
}

TEST_CASE("master rhs matches the liouvillian") {
  const auto p = chain(3, 0.3, 1.0, 2);
  const CMatrix l = liouvillian(p);
  std::mt19937_64 gen(2);
  const CMatrix rho = oracle::random_density(static_cast<int>(p.basis.dim()), gen);
  const CMatrix dot = master_rhs(p, rho);
  const Eigen::Map<const CVector> v(rho.data(), rho.size());
  const CVector lv = l * v;
  const Eigen::Map<const CVector> dv(dot.data(), dot.size());
  CHECK((lv - dv).cwiseAbs().maxCoeff() < 1e-9 * l.cwiseAbs().maxCoeff());

  // Trace preservation: vec(I)^+ L = 0.
  const auto d = static_cast<Eigen::Index>(p.basis.dim());
  CVector id = CVector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) id(i * d + i) = 1.0;
  CHECK((id.adjoint() * l).cwiseAbs().maxCoeff() < 1e-12 * l.cwiseAbs().maxCoeff());
}

TEST_CASE("liouvillian spectrum is contracting") {
  for (int n = 2; n <= 4; ++n) {
    for (double a0 : {0.2, 0.26, 0.3}) {
      const auto spec = liouvillian_spectrum(chain(n, a0, 1.0, 2));
      double worst = -1.0;
      for (const auto& e : spec) worst = std::max(worst, e.real());
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("steady state") {
  const SteadyStateResult atom = steady_state(single_atom(0.0, 1.0, 1.0, 2));
  CHECK(std::abs(atom.rho(0, 0) - 1.0) < 1e-12);

  const auto p = chain(4, 0.26, 1000.0, 2);
  const SteadyStateResult ss = steady_state(p);
  CHECK(physicality(ss.rho).trace_error < 1e-12);
  const MasterResult longrun = evolve_master(p, ground_rho(p.basis.dim()));
  CHECK(trace_distance(longrun.rho.back(), ss.rho) < 1e-4);

  auto step = p;
  step.t_final = 0.1;
  step.sample_times = {0.0, 0.1};
  const MasterResult after = evolve_master(step, ss.rho);
  CHECK(trace_distance(after.rho.back(), ss.rho) < 1e-6);

  CHECK_THROWS_AS(steady_state(single_atom(0.0, 0.0, 1.0, 2)), NumericalError);
}

TEST_CASE("problem limits") {
  CHECK_THROWS(evolve_master(chain(9, 0.26, 1.0, 2, Tier::full), QuantumState::ground(9)));
  auto p = chain(3, 0.3, 1.0, 3);
  p.sample_times = {0.0, 2.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("trajectory survival statistics") {
  const auto p = single_atom(0.0, 1.0, 2.0, 5);
  TrajectoryOptions opt;
  opt.dt = 0.01;
  opt.keep_states = false;
  const auto e = evolve_trajectories(p, QuantumState::basis_state(1, 1), 10000, 3, opt);
  CHECK(e.failures.empty());
  for (std::size_t k = 0; k < e.times.size(); ++k) {
    const double expect = std::exp(-e.times[k]);
    const double se = std::sqrt(expect * (1 - expect) / 10000) + 1e-12;
    CHECK(std::abs(e.mean_rho[k](1, 1).real() - expect) < 3 * se + 1e-9);
  }
}

TEST_CASE("trajectories agree with the master equation") {
  const auto p = chain(4, 0.26, 60.0, 31);
  const MasterResult m = evolve_master(p, ground_rho(p.basis.dim()));
  TrajectoryOptions opt;
  opt.keep_states = false;
  opt.workers = 2;
  CVector psi0 = CVector::Zero(static_cast<Eigen::Index>(p.basis.dim()));
  psi0(0) = 1.0;
  const auto e = evolve_trajectories(p, psi0, 1000, 17, opt);
  double worst = 0.0;
  for (std::size_t k = 0; k < m.rho.size(); ++k) {
    worst = std::max(worst, trace_distance(e.mean_rho[k], m.rho[k]));
    CHECK(std::abs(e.mean_rho[k].trace() - 1.0) < 1e-6);
  }
  CHECK(worst < 0.05);
}

TEST_CASE("trajectory determinism") {
  const auto p = chain(4, 0.26, 20.0, 11);
  CVector psi0 = CVector::Zero(static_cast<Eigen::Index>(p.basis.dim()));
  psi0(0) = 1.0;
  TrajectoryOptions one;
  const auto a = evolve_trajectories(p, psi0, 10, 99, one);
  const auto b = evolve_trajectories(p, psi0, 10, 99, one);
  TrajectoryOptions many;
  many.workers = 3;
  const auto c = evolve_trajectories(p, psi0, 10, 99, many);
  for (std::size_t k = 0; k < a.mean_rho.size(); ++k) {
    CHECK((a.mean_rho[k] - b.mean_rho[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.mean_rho[k] - c.mean_rho[k]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(a.jump_counts == c.jump_counts);
  const auto d = evolve_trajectories(p, psi0, 10, 100, one);
  CHECK((a.mean_rho.back() - d.mean_rho.back()).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.states.size() == 10);
  CHECK(a.states[0].size() == a.times.size());
}
