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

#include "rydpump/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace ryd {

int popcount(std::uint64_t mask) { return std::popcount(mask); }

BasisIndexer::BasisIndexer(int n_sites, std::vector<std::uint64_t> masks, bool full)
    : n_sites_(n_sites), full_(full), masks_(std::move(masks)), subspaces_(n_sites + 1) {
  for (std::size_t k = 0; k < masks_.size(); ++k) {
    if (!full_) lookup_.emplace(masks_[k], k);
    subspaces_[popcount(masks_[k])].push_back(k);
  }
}

BasisIndexer BasisIndexer::full(int n_sites) {
  if (n_sites < 1 || n_sites > kDenseSiteLimit) {
    throw ConfigError("n_sites", "full basis supports 1.." + std::to_string(kDenseSiteLimit) + " sites");
  }
  std::vector<std::uint64_t> masks(std::size_t{1} << n_sites);
  for (std::size_t k = 0; k < masks.size(); ++k) masks[k] = k;
  return BasisIndexer(n_sites, std::move(masks), true);
}

BasisIndexer BasisIndexer::pump_sector(int n_sites) {
  if (n_sites < 1 || n_sites > 62) throw ConfigError("n_sites", "pump sector supports 1..62 sites");
  std::vector<std::uint64_t> masks{0};
  for (int i = 0; i < n_sites; ++i) masks.push_back(std::uint64_t{1} << i);
  for (int i = 0; i + 1 < n_sites; ++i) masks.push_back((std::uint64_t{3}) << i);
  return BasisIndexer(n_sites, std::move(masks), false);
}

BasisIndexer BasisIndexer::single_excitation(int n_sites) {
  if (n_sites < 1 || n_sites > 62) throw ConfigError("n_sites", "single-excitation basis supports 1..62 sites");
  std::vector<std::uint64_t> masks{0};
  for (int i = 0; i < n_sites; ++i) masks.push_back(std::uint64_t{1} << i);
  return BasisIndexer(n_sites, std::move(masks), false);
}

long BasisIndexer::index_of(std::uint64_t mask) const {
  if (full_) return mask < masks_.size() ? static_cast<long>(mask) : -1;
  auto it = lookup_.find(mask);
  return it == lookup_.end() ? -1 : static_cast<long>(it->second);
}

const std::vector<std::size_t>& BasisIndexer::subspace(int n) const {
  if (n < 0 || n > n_sites_) throw ConfigError("n", "excitation number out of range");
  return subspaces_[n];
}

namespace {

void check_sites(int n_sites) {
  if (n_sites < 1 || n_sites > kDenseSiteLimit) {
    throw ConfigError("n_sites", "dense states support 1.." + std::to_string(kDenseSiteLimit) + " sites");
  }
}

void validate_density(const CMatrix& rho, double tol) {
  const Physicality ph = physicality(rho);
  if (ph.hermiticity_error > tol) throw NumericalError("density matrix is not Hermitian");
  if (ph.trace_error > tol) throw NumericalError("density matrix trace differs from 1");
  if (ph.min_eigenvalue < -tol) throw NumericalError("density matrix has a negative eigenvalue");
}

}  // namespace

QuantumState::QuantumState(Kind kind, int n_sites, CVector psi, CMatrix rho)
    : kind_(kind), n_sites_(n_sites), psi_(std::move(psi)), rho_(std::move(rho)) {}

QuantumState QuantumState::pure(int n_sites, CVector amplitudes, double tol) {
  check_sites(n_sites);
  if (static_cast<std::size_t>(amplitudes.size()) != (std::size_t{1} << n_sites)) {
    throw ConfigError("amplitudes", "length must be 2^N");
  }
  if (std::abs(amplitudes.norm() - 1.0) > tol) throw NumericalError("state vector is not normalized");
  return QuantumState(Kind::pure, n_sites, std::move(amplitudes), CMatrix());
}

QuantumState QuantumState::mixed(int n_sites, CMatrix rho, double tol) {
  check_sites(n_sites);
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_sites);
  if (rho.rows() != d || rho.cols() != d) throw ConfigError("rho", "shape must be 2^N x 2^N");
  validate_density(rho, tol);
  return QuantumState(Kind::mixed, n_sites, CVector(), std::move(rho));
}

QuantumState QuantumState::ground(int n_sites) { return basis_state(n_sites, 0); }

QuantumState QuantumState::basis_state(int n_sites, std::uint64_t mask) {
  check_sites(n_sites);
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_sites));
  if (mask >= static_cast<std::uint64_t>(psi.size())) throw ConfigError("mask", "outside the register");
  psi(static_cast<Eigen::Index>(mask)) = 1.0;
  return pure(n_sites, std::move(psi));
}

QuantumState QuantumState::from_sector(const BasisIndexer& basis, const CVector& amplitudes, double tol) {
  check_sites(basis.n_sites());
  if (static_cast<std::size_t>(amplitudes.size()) != basis.dim()) throw ConfigError("amplitudes", "sector size mismatch");
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << basis.n_sites()));
  for (std::size_t k = 0; k < basis.dim(); ++k) psi(static_cast<Eigen::Index>(basis.mask(k))) = amplitudes(k);
  return pure(basis.n_sites(), std::move(psi), tol);
}

QuantumState QuantumState::from_sector(const BasisIndexer& basis, const CMatrix& rho, double tol) {
  check_sites(basis.n_sites());
  const auto d = static_cast<Eigen::Index>(basis.dim());
  if (rho.rows() != d || rho.cols() != d) throw ConfigError("rho", "sector size mismatch");
  const auto full = static_cast<Eigen::Index>(std::size_t{1} << basis.n_sites());
  CMatrix out = CMatrix::Zero(full, full);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      out(static_cast<Eigen::Index>(basis.mask(a)), static_cast<Eigen::Index>(basis.mask(b))) = rho(a, b);
    }
  }
  return mixed(basis.n_sites(), std::move(out), tol);
}

const CVector& QuantumState::amplitudes() const {
  if (kind_ != Kind::pure) throw ConfigError("state", "mixed state has no amplitude vector");
  return psi_;
}

const CMatrix& QuantumState::matrix() const {
  if (kind_ != Kind::mixed) throw ConfigError("state", "pure state has no stored density matrix");
  return rho_;
}

CMatrix QuantumState::density() const {
  if (kind_ == Kind::mixed) return rho_;
  return psi_ * psi_.adjoint();
}

CVector QuantumState::sector_amplitudes(const BasisIndexer& basis, double tol) const {
  if (basis.n_sites() != n_sites_) throw ConfigError("basis", "site count mismatch");
  const CVector& psi = amplitudes();
  CVector out(static_cast<Eigen::Index>(basis.dim()));
  double kept = 0.0;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    out(k) = psi(static_cast<Eigen::Index>(basis.mask(k)));
    kept += std::norm(out(k));
  }
  if (std::abs(psi.squaredNorm() - kept) > tol) throw ConfigError("state", "weight outside the requested sector");
  return out;
}

CMatrix QuantumState::sector_density(const BasisIndexer& basis, double tol) const {
  if (basis.n_sites() != n_sites_) throw ConfigError("basis", "site count mismatch");
  const CMatrix rho = density();
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix out(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      out(a, b) = rho(static_cast<Eigen::Index>(basis.mask(a)), static_cast<Eigen::Index>(basis.mask(b)));
    }
  }
  if (std::abs(rho.trace().real() - out.trace().real()) > tol) {
    throw ConfigError("state", "weight outside the requested sector");
  }
  return out;
}

SingleExcitationState SingleExcitationState::from_amplitudes(int n_sites, const CVector& amplitudes, double tol) {
  if (amplitudes.size() != n_sites + 1) throw ConfigError("amplitudes", "length must be N+1");
  if (std::abs(amplitudes.norm() - 1.0) > tol) throw NumericalError("state vector is not normalized");
  return SingleExcitationState(n_sites, amplitudes * amplitudes.adjoint());
}

SingleExcitationState SingleExcitationState::from_density(int n_sites, CMatrix rho, double tol) {
  if (n_sites < 1) throw ConfigError("n_sites", "must be positive");
  if (rho.rows() != n_sites + 1 || rho.cols() != n_sites + 1) throw ConfigError("rho", "shape must be (N+1)^2");
  validate_density(rho, tol);
  return SingleExcitationState(n_sites, std::move(rho));
}

SingleExcitationState SingleExcitationState::from_site_amplitudes(const CVector& site_amplitudes) {
  const auto n = static_cast<int>(site_amplitudes.size());
  const double norm = site_amplitudes.norm();
  if (n < 1 || norm == 0.0) throw ConfigError("amplitudes", "need a non-zero vector");
  CVector full = CVector::Zero(n + 1);
  full.tail(n) = site_amplitudes / norm;
  return from_amplitudes(n, full);
}

namespace {

std::vector<int> sorted_keep(const std::vector<int>& keep, int n_sites) {
  if (keep.empty()) throw ConfigError("keep", "empty site set");
  std::vector<int> out = keep;
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw ConfigError("keep", "duplicate site");
  if (out.front() < 0 || out.back() >= n_sites) throw ConfigError("keep", "site index out of range");
  return out;
}

// Scatter the bits of `local` onto the listed positions.
std::uint64_t deposit(std::uint64_t local, const std::vector<int>& positions) {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if ((local >> k) & 1U) out |= std::uint64_t{1} << positions[k];
  }
  return out;
}

}  // namespace

QuantumState partial_trace(const QuantumState& state, const std::vector<int>& keep) {
  const int n = state.n_sites();
  const auto kept = sorted_keep(keep, n);
  std::vector<int> env;
  for (int i = 0, k = 0; i < n; ++i) {
    if (k < static_cast<int>(kept.size()) && kept[k] == i) {
      ++k;
    } else {
      env.push_back(i);
    }
  }
  const std::size_t dk = std::size_t{1} << kept.size();
  const std::size_t de = std::size_t{1} << env.size();
  std::vector<Eigen::Index> ik(dk), ie(de);
  for (std::size_t a = 0; a < dk; ++a) ik[a] = static_cast<Eigen::Index>(deposit(a, kept));
  for (std::size_t e = 0; e < de; ++e) ie[e] = static_cast<Eigen::Index>(deposit(e, env));

  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  if (state.kind() == QuantumState::Kind::pure) {
    const CVector& psi = state.amplitudes();
    CMatrix m(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(de));
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t e = 0; e < de; ++e) m(a, e) = psi(ik[a] | ie[e]);
    out = m * m.adjoint();
  } else {
    const CMatrix& rho = state.matrix();
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t b = 0; b < dk; ++b) {
        cplx s = 0.0;
        for (std::size_t e = 0; e < de; ++e) s += rho(ik[a] | ie[e], ik[b] | ie[e]);
        out(a, b) = s;
      }
  }
  return QuantumState::mixed(static_cast<int>(kept.size()), std::move(out));
}

SingleExcitationState partial_trace(const SingleExcitationState& state, const std::vector<int>& keep) {
  const int n = state.n_sites();
  const auto kept = sorted_keep(keep, n);
  const CMatrix& rho = state.matrix();
  const auto m = static_cast<Eigen::Index>(kept.size());
  CMatrix out = CMatrix::Zero(m + 1, m + 1);
  std::vector<bool> is_kept(n, false);
  for (int s : kept) is_kept[s] = true;
  out(0, 0) = rho(0, 0);
  for (int i = 0; i < n; ++i) {
    if (!is_kept[i]) out(0, 0) += rho(1 + i, 1 + i);
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    out(0, 1 + a) = rho(0, 1 + kept[a]);
    out(1 + a, 0) = rho(1 + kept[a], 0);
    for (Eigen::Index b = 0; b < m; ++b) out(1 + a, 1 + b) = rho(1 + kept[a], 1 + kept[b]);
  }
  return SingleExcitationState::from_density(static_cast<int>(m), std::move(out));
}

ExcitationStats excitation_statistics(const QuantumState& state) {
  ExcitationStats s;
  const auto d = static_cast<Eigen::Index>(state.dim());
  for (Eigen::Index k = 0; k < d; ++k) {
    const double w = state.kind() == QuantumState::Kind::pure ? std::norm(state.amplitudes()(k))
                                                              : state.matrix()(k, k).real();
    const int n = popcount(static_cast<std::uint64_t>(k));
    if (n == 0) {
      s.p0 += w;
    } else if (n == 1) {
      s.p1 += w;
    } else {
      s.p_ge2 += w;
    }
  }
  return s;
}

ExcitationStats excitation_statistics(const SingleExcitationState& state) {
  const CMatrix& rho = state.matrix();
  return {rho(0, 0).real(), rho.trace().real() - rho(0, 0).real(), 0.0};
}

CMatrix single_excitation_block(const QuantumState& state) {
  const int n = state.n_sites();
  CMatrix out(n, n);
  if (state.kind() == QuantumState::Kind::pure) {
    const CVector& psi = state.amplitudes();
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = psi(Eigen::Index{1} << i);
    out = v * v.adjoint();
  } else {
    const CMatrix& rho = state.matrix();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = rho(Eigen::Index{1} << i, Eigen::Index{1} << j);
  }
  return out;
}

CMatrix single_excitation_block(const SingleExcitationState& state) {
  const int n = state.n_sites();
  return state.matrix().bottomRightCorner(n, n);
}

QuantumState make_w_state(int n_sites, const std::vector<int>& sites, const std::vector<cplx>& coeffs) {
  check_sites(n_sites);
  if (sites.empty()) throw ConfigError("sites", "empty site set");
  if (!coeffs.empty() && coeffs.size() != sites.size()) throw ConfigError("coeffs", "length must match sites");
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_sites));
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] < 0 || sites[k] >= n_sites) throw ConfigError("sites", "site index out of range");
    psi(Eigen::Index{1} << sites[k]) += coeffs.empty() ? cplx(1.0) : coeffs[k];
  }
  const double norm = psi.norm();
  if (norm == 0.0) throw ConfigError("coeffs", "zero coefficient vector");
  return QuantumState::pure(n_sites, psi / norm);
}

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

Physicality physicality(const CMatrix& rho) {
  Physicality ph;
  ph.trace_error = std::abs(rho.trace() - cplx(1.0));
  ph.hermiticity_error = hermiticity_defect(rho);
  const CMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  ph.min_eigenvalue = es.eigenvalues().minCoeff();
  return ph;
}

double purity(const CMatrix& rho) { return (rho * rho).trace().real(); }

double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix d = a - b;
  const CMatrix h = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace ryd
