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
#include <unordered_map>
#include <vector>

#include "rydpump/types.hpp"

namespace ryd {

// Largest N held as a dense vector or matrix over all 2^N configurations.
inline constexpr int kDenseSiteLimit = 12;

// Ordered set of computational basis configurations. Bit i of a mask is
// site i (0-based), set meaning |r>.
class BasisIndexer {
 public:
  // All 2^N configurations; index == mask.
  static BasisIndexer full(int n_sites);
  // {G} + {r_i} + {r_i r_{i+1}}: the sector reached by pair pumping and decay.
  static BasisIndexer pump_sector(int n_sites);
  // {G} + {r_i}
  static BasisIndexer single_excitation(int n_sites);

  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return masks_.size(); }
  std::uint64_t mask(std::size_t k) const { return masks_[k]; }
  const std::vector<std::uint64_t>& masks() const { return masks_; }
  bool is_full() const { return full_; }

  // Position of a mask, or -1 when it is not part of the basis.
  long index_of(std::uint64_t mask) const;

  // Basis positions with popcount n, in basis order.
  const std::vector<std::size_t>& subspace(int n) const;

 private:
  BasisIndexer(int n_sites, std::vector<std::uint64_t> masks, bool full);

  int n_sites_ = 0;
  bool full_ = false;
  std::vector<std::uint64_t> masks_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
  std::vector<std::vector<std::size_t>> subspaces_;
};

int popcount(std::uint64_t mask);

// Pure vector or density matrix over the full 2^N basis.
class QuantumState {
 public:
  enum class Kind { pure, mixed };

  static QuantumState pure(int n_sites, CVector amplitudes, double tol = 1e-9);
  static QuantumState mixed(int n_sites, CMatrix rho, double tol = 1e-9);
  static QuantumState ground(int n_sites);
  static QuantumState basis_state(int n_sites, std::uint64_t mask);

  // Embed a vector or matrix written in a sub-basis.
  static QuantumState from_sector(const BasisIndexer& basis, const CVector& amplitudes, double tol = 1e-9);
  static QuantumState from_sector(const BasisIndexer& basis, const CMatrix& rho, double tol = 1e-9);

  Kind kind() const { return kind_; }
  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return std::size_t{1} << n_sites_; }
  const CVector& amplitudes() const;
  const CMatrix& matrix() const;
  CMatrix density() const;

  // Restrict to a sub-basis; throws when weight lies outside it.
  CVector sector_amplitudes(const BasisIndexer& basis, double tol = 1e-9) const;
  CMatrix sector_density(const BasisIndexer& basis, double tol = 1e-9) const;

 private:
  QuantumState(Kind kind, int n_sites, CVector psi, CMatrix rho);

  Kind kind_ = Kind::pure;
  int n_sites_ = 0;
  CVector psi_;
  CMatrix rho_;
};

// Density matrix over {G, r_1..r_N}; index 0 is G, index 1+i is site i.
class SingleExcitationState {
 public:
  static SingleExcitationState from_amplitudes(int n_sites, const CVector& amplitudes, double tol = 1e-9);
  static SingleExcitationState from_density(int n_sites, CMatrix rho, double tol = 1e-9);
  // Excitation amplitudes over sites only (ground weight zero).
  static SingleExcitationState from_site_amplitudes(const CVector& site_amplitudes);

  int n_sites() const { return n_sites_; }
  const CMatrix& matrix() const { return rho_; }

 private:
  SingleExcitationState(int n_sites, CMatrix rho) : n_sites_(n_sites), rho_(std::move(rho)) {}

  int n_sites_ = 0;
  CMatrix rho_;
};

struct ExcitationStats {
  double p0 = 0.0;
  double p1 = 0.0;
  double p_ge2 = 0.0;
};

QuantumState partial_trace(const QuantumState& state, const std::vector<int>& keep);
SingleExcitationState partial_trace(const SingleExcitationState& state, const std::vector<int>& keep);

ExcitationStats excitation_statistics(const QuantumState& state);
ExcitationStats excitation_statistics(const SingleExcitationState& state);

// Unnormalized P1 rho P1 as an N x N matrix in site order.
CMatrix single_excitation_block(const QuantumState& state);
CMatrix single_excitation_block(const SingleExcitationState& state);

// Normalized W state over `sites` (0-based) in an n_sites register.
QuantumState make_w_state(int n_sites, const std::vector<int>& sites, const std::vector<cplx>& coeffs = {});

struct Physicality {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

Physicality physicality(const CMatrix& rho);
double purity(const CMatrix& rho);
double trace_distance(const CMatrix& a, const CMatrix& b);
double hermiticity_defect(const CMatrix& m);

}  // namespace ryd
