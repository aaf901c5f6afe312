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

#include "rydpump/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rydpump/rng.hpp"

namespace ryd {

std::string to_string(Tier t) { return t == Tier::full ? "full" : "effective"; }

Tier tier_from_string(const std::string& s) {
  if (s == "full") return Tier::full;
  if (s == "effective") return Tier::effective;
  throw ConfigError("dynamics.tier", "expected full or effective, got " + s);
}

void EvolutionProblem::validate() const {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  if (hamiltonian.rows() != d || hamiltonian.cols() != d) throw ConfigError("hamiltonian", "dimension mismatch");
  for (const Jump& j : jumps) {
    if (j.op.rows() != d || j.op.cols() != d) throw ConfigError("jumps", "dimension mismatch");
    if (j.rate < 0.0) throw ConfigError("jumps", "negative rate");
  }
  if (!(t_final >= 0.0)) throw ConfigError("dynamics.t_final", "must be non-negative");
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (sample_times[k] < 0.0 || sample_times[k] > t_final * (1 + 1e-12)) {
      throw ConfigError("dynamics.sample_times", "outside [0, t_final]");
    }
    if (k > 0 && sample_times[k] < sample_times[k - 1]) throw ConfigError("dynamics.sample_times", "not sorted");
  }
}

std::vector<double> uniform_samples(double t_final, int count) {
  if (count < 2) throw ConfigError("dynamics.samples", "need at least 2 samples");
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = t_final * k / (count - 1);
  out.back() = t_final;
  return out;
}

EvolutionProblem make_problem(const LatticeSpec& spec, const DriveConfig& drive, Tier tier, Truncation truncation,
                              double t_final, std::vector<double> sample_times) {
  spec.validate();
  drive.validate(spec.n_sites);
  EvolutionProblem p;
  if (tier == Tier::full) {
    p.basis = BasisIndexer::full(spec.n_sites);
    p.hamiltonian = build_full_hamiltonian(spec, drive);
  } else {
    p.basis = BasisIndexer::pump_sector(spec.n_sites);
    p.hamiltonian = build_effective_hamiltonian(build_effective_model(spec, drive, truncation), p.basis);
  }
  p.jumps = lindblad_jumps(drive, p.basis);
  p.t_final = t_final;
  p.sample_times = std::move(sample_times);
  p.validate();
  return p;
}

namespace {

SparseOp nonhermitian_hamiltonian(const EvolutionProblem& p) {
  SparseOp h = p.hamiltonian;
  for (const Jump& j : p.jumps) {
    const SparseOp ldl = SparseOp(j.op.adjoint()) * j.op;
    h -= (0.5 * j.rate * kI) * ldl;
  }
  h.makeCompressed();
  return h;
}

// rho' = -i (Heff rho - rho Heff^+) + Sum_k g_k L rho L^+
struct MasterGenerator {
  SparseOp heff;
  SparseOp heff_adj;
  struct Channel {
    double rate;
    SparseOp op;
    SparseOp op_adj;
  };
  std::vector<Channel> jumps;

  explicit MasterGenerator(const EvolutionProblem& p) : heff(nonhermitian_hamiltonian(p)) {
    heff_adj = heff.adjoint();
    for (const Jump& j : p.jumps) jumps.push_back({j.rate, j.op, SparseOp(j.op.adjoint())});
  }

  CMatrix operator()(const CMatrix& rho) const {
    CMatrix out = -kI * (heff * rho - rho * heff_adj);
    for (const Channel& c : jumps) {
      const CMatrix lr = c.op * rho;
      out.noalias() += c.rate * (lr * c.op_adj);
    }
    return out;
  }
};

}  // namespace

CMatrix master_rhs(const EvolutionProblem& problem, const CMatrix& rho) { return MasterGenerator(problem)(rho); }

MasterResult evolve_master(const EvolutionProblem& problem, const QuantumState& rho0, const OdeOptions& opt) {
  if (rho0.n_sites() != problem.basis.n_sites()) throw ConfigError("rho0", "site count mismatch");
  return evolve_master(problem, rho0.sector_density(problem.basis), opt);
}

MasterResult evolve_master(const EvolutionProblem& problem, const CMatrix& rho0, const OdeOptions& opt) {
  problem.validate();
  if (problem.basis.dim() > kMasterDimLimit) throw ConfigError("basis", "above the dense master-equation limit");
  if (rho0.rows() != static_cast<Eigen::Index>(problem.basis.dim()) || rho0.cols() != rho0.rows()) {
    throw ConfigError("rho0", "dimension mismatch");
  }
  const MasterGenerator gen(problem);
  MasterResult out;
  out.basis = problem.basis;
  auto rhs = [&](double, const CMatrix& r) { return gen(r); };
  auto observe = [&](double t, const CMatrix& r) {
    out.times.push_back(t);
    out.rho.push_back(r);
  };
  out.stats = integrate_dopri5<CMatrix>(rhs, rho0, 0.0, problem.sample_times, observe, opt);
  return out;
}

namespace {

template <class Op>
CVector rk4_step(const Op& heff, const CVector& psi, double h) {
  const CVector k1 = -kI * (heff * psi);
  const CVector k2 = -kI * (heff * (psi + 0.5 * h * k1));
  const CVector k3 = -kI * (heff * (psi + 0.5 * h * k2));
  const CVector k4 = -kI * (heff * (psi + h * k3));
  return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct TrajectoryOutcome {
  std::vector<CVector> states;
  long jumps = 0;
};

template <class Op>
TrajectoryOutcome run_trajectory(const Op& heff, const std::vector<std::pair<double, SparseOp>>& channels,
                                 const CVector& psi0, const std::vector<double>& times, double dt, std::uint64_t seed,
                                 std::uint64_t index) {
  Philox4x32 rng(seed, index);
  TrajectoryOutcome out;
  out.states.reserve(times.size());
  CVector psi = psi0;
  double r = rng.uniform();
  double t = 0.0;
  std::vector<double> weights(channels.size());
  for (double target : times) {
    while (t < target - 1e-12) {
      const double h = std::min(dt, target - t);
      CVector trial = rk4_step(heff, psi, h);
      if (trial.squaredNorm() > r) {
        psi = std::move(trial);
        t = (h == target - t) ? target : t + h;
        continue;
      }
      double lo = 0.0, hi = h;
      while (hi - lo > 1e-13 * std::max(1.0, h)) {
        const double mid = 0.5 * (lo + hi);
        if (rk4_step(heff, psi, mid).squaredNorm() > r) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      psi = rk4_step(heff, psi, hi);
      t += hi;
      double total = 0.0;
      for (std::size_t k = 0; k < channels.size(); ++k) {
        weights[k] = channels[k].first * (channels[k].second * psi).squaredNorm();
        total += weights[k];
      }
      if (!(total > 0.0)) throw NumericalError("jump requested but no channel has weight");
      double pick = rng.uniform() * total;
      std::size_t chosen = channels.size() - 1;
      for (std::size_t k = 0; k < channels.size(); ++k) {
        if (pick < weights[k]) {
          chosen = k;
          break;
        }
        pick -= weights[k];
      }
      psi = channels[chosen].second * psi;
      const double nrm = psi.norm();
      if (!(nrm > 1e-150)) throw NumericalError("state norm collapsed after a jump");
      psi /= nrm;
      ++out.jumps;
      r = rng.uniform();
    }
    const double nrm = psi.norm();
    if (!(nrm > 1e-150) || !std::isfinite(nrm)) throw NumericalError("state norm underflow");
    out.states.push_back(psi / nrm);
  }
  return out;
}

}  // namespace

TrajectoryEnsemble evolve_trajectories(const EvolutionProblem& problem, const QuantumState& psi0, std::size_t n_traj,
                                       std::uint64_t seed, const TrajectoryOptions& opt) {
  if (psi0.kind() != QuantumState::Kind::pure) throw ConfigError("psi0", "trajectories need a pure initial state");
  if (psi0.n_sites() != problem.basis.n_sites()) throw ConfigError("psi0", "site count mismatch");
  return evolve_trajectories(problem, psi0.sector_amplitudes(problem.basis), n_traj, seed, opt);
}

TrajectoryEnsemble evolve_trajectories(const EvolutionProblem& problem, const CVector& psi0, std::size_t n_traj,
                                       std::uint64_t seed, const TrajectoryOptions& opt) {
  problem.validate();
  if (psi0.size() != static_cast<Eigen::Index>(problem.basis.dim())) throw ConfigError("psi0", "dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw ConfigError("psi0", "not normalized");
  if (n_traj == 0) throw ConfigError("dynamics.n_traj", "must be positive");
  if (!(opt.dt > 0.0)) throw ConfigError("dynamics.dt", "must be positive");

  const SparseOp heff_sparse = nonhermitian_hamiltonian(problem);
  const bool dense = problem.basis.dim() <= kMasterDimLimit;
  const CMatrix heff_dense = dense ? CMatrix(heff_sparse) : CMatrix();
  std::vector<std::pair<double, SparseOp>> channels;
  for (const Jump& j : problem.jumps) channels.emplace_back(j.rate, j.op);

  TrajectoryEnsemble ens;
  ens.basis = problem.basis;
  ens.n_traj = n_traj;
  ens.seed = seed;
  ens.times = problem.sample_times;
  ens.states.resize(n_traj);
  ens.jump_counts.assign(n_traj, 0);
  std::vector<std::string> errors(n_traj);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next.fetch_add(1); k < n_traj; k = next.fetch_add(1)) {
      try {
        TrajectoryOutcome o = dense ? run_trajectory(heff_dense, channels, psi0, ens.times, opt.dt, seed, k)
                                    : run_trajectory(heff_sparse, channels, psi0, ens.times, opt.dt, seed, k);
        ens.states[k] = std::move(o.states);
        ens.jump_counts[k] = o.jumps;
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const int workers = std::max(1, opt.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const auto d = static_cast<Eigen::Index>(problem.basis.dim());
  ens.mean_rho.assign(ens.times.size(), CMatrix::Zero(d, d));
  std::size_t ok = 0;
  for (std::size_t k = 0; k < n_traj; ++k) {
    if (!errors[k].empty()) {
      ens.failures.push_back({k, errors[k]});
      continue;
    }
    ++ok;
    for (std::size_t s = 0; s < ens.times.size(); ++s) {
      ens.mean_rho[s].noalias() += ens.states[k][s] * ens.states[k][s].adjoint();
    }
  }
  if (ok == 0) throw NumericalError("every trajectory failed: " + errors.front());
  for (auto& m : ens.mean_rho) m /= static_cast<double>(ok);
  if (!opt.keep_states) ens.states.clear();
  return ens;
}

namespace {

// (B^T kron A)
void add_kron(CMatrix& out, const CMatrix& bt, const CMatrix& a, cplx scale) {
  const Eigen::Index d = a.rows();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const cplx b = bt(i, j);
      if (b == cplx(0.0)) continue;
      out.block(i * d, j * d, d, d) += (scale * b) * a;
    }
}

}  // namespace

CMatrix liouvillian(const EvolutionProblem& problem) {
  problem.validate();
  if (problem.basis.dim() > kLiouvillianDimLimit) throw ConfigError("basis", "above the dense Liouvillian limit");
  const auto d = static_cast<Eigen::Index>(problem.basis.dim());
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix h = CMatrix(problem.hamiltonian);
  CMatrix l = CMatrix::Zero(d * d, d * d);
  add_kron(l, id, h, -kI);
  add_kron(l, h.transpose(), id, kI);
  for (const Jump& j : problem.jumps) {
    const CMatrix op = CMatrix(j.op);
    const CMatrix ldl = op.adjoint() * op;
    add_kron(l, op.conjugate(), op, j.rate);
    add_kron(l, id, ldl, -0.5 * j.rate);
    add_kron(l, ldl.transpose(), id, -0.5 * j.rate);
  }
  return l;
}

std::vector<cplx> liouvillian_spectrum(const EvolutionProblem& problem) {
  Eigen::ComplexEigenSolver<CMatrix> es(liouvillian(problem), false);
  if (es.info() != Eigen::Success) throw NumericalError("Liouvillian eigensolver failed");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

SteadyStateResult steady_state(const EvolutionProblem& problem, double degeneracy_tol) {
  const CMatrix l = liouvillian(problem);
  Eigen::BDCSVD<CMatrix> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index n = sv.size();
  SteadyStateResult out;
  out.basis = problem.basis;
  out.smallest_singular = sv(n - 1);
  out.next_singular = n > 1 ? sv(n - 2) : 0.0;
  if (n > 1 && out.next_singular < degeneracy_tol) {
    throw NumericalError("Liouvillian kernel is degenerate; steady state is not unique");
  }
  const auto d = static_cast<Eigen::Index>(problem.basis.dim());
  const CVector v = svd.matrixV().col(n - 1);
  CMatrix rho = Eigen::Map<const CMatrix>(v.data(), d, d);
  rho = 0.5 * (rho + rho.adjoint());
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-14) throw NumericalError("steady-state kernel vector has zero trace");
  out.rho = rho / tr.real();
  return out;
}

}  // namespace ryd
