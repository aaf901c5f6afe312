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

#include "rydpump/hamiltonians.hpp"

#include <cmath>

namespace ryd {

DriveConfig DriveConfig::with_reservoir(int n_sites, double omega, std::vector<int> reservoir, double gamma_r,
                                        double gamma) {
  DriveConfig d;
  d.omega = omega;
  d.gamma_r = gamma_r;
  d.gamma_site.assign(n_sites, gamma_r);
  for (int s : reservoir) {
    if (s < 0 || s >= n_sites) throw ConfigError("drive.reservoir_sites", "site index out of range");
    d.gamma_site[s] = gamma;
  }
  d.reservoir_sites = std::move(reservoir);
  return d;
}

double DriveConfig::detuning(const LatticeSpec& spec) const {
  return delta ? *delta : 0.5 * nearest_neighbor_shift(spec);
}

void DriveConfig::validate(int n_sites) const {
  if (!(omega > 0.0)) throw ConfigError("drive.omega", "must be positive");
  if (!(gamma_r >= 0.0)) throw ConfigError("drive.gamma_r", "must be non-negative");
  if (static_cast<int>(gamma_site.size()) != n_sites) {
    throw ConfigError("drive.gamma_site", "needs one rate per site");
  }
  for (double g : gamma_site) {
    if (!(g >= 0.0)) throw ConfigError("drive.gamma_site", "negative rate");
  }
  for (int s : reservoir_sites) {
    if (s < 0 || s >= n_sites) throw ConfigError("drive.reservoir_sites", "site index out of range");
  }
}

LatticeSpec lattice_for_drive(int n_sites, double a0, double xi, const DriveConfig& drive, int p) {
  return LatticeSpec::in_blockade_units(n_sites, a0, xi, drive.linewidth(), p);
}

std::string to_string(Truncation t) { return t == Truncation::full ? "full" : "next_nearest"; }

Truncation truncation_from_string(const std::string& s) {
  if (s == "full") return Truncation::full;
  if (s == "next_nearest") return Truncation::next_nearest;
  throw ConfigError("truncation", "expected full or next_nearest, got " + s);
}

SparseOp build_full_hamiltonian(const LatticeSpec& spec, const DriveConfig& drive) {
  const int n = spec.n_sites;
  if (n > kDenseSiteLimit) throw ConfigError("lattice.n_sites", "above the dense limit");
  const PairShiftTable shifts(spec);
  const double delta = drive.detuning(spec);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(dim) * (n + 1));
  for (Eigen::Index m = 0; m < dim; ++m) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!((m >> i) & 1)) continue;
      e += delta;
      for (int j = i + 1; j < n; ++j) {
        if ((m >> j) & 1) e -= shifts(i, j);
      }
    }
    if (e != 0.0) t.emplace_back(m, m, e);
    for (int i = 0; i < n; ++i) t.emplace_back(m ^ (Eigen::Index{1} << i), m, drive.omega);
  }
  SparseOp h(dim, dim);
  h.setFromTriplets(t.begin(), t.end());
  return h;
}

namespace {

// Omega^2/delta - Omega^2/(delta - shift), written without the cancellation.
double pair_exchange(double omega, double delta, double shift, double w_d) {
  if (std::abs(delta - shift) < 1e-9 * w_d) {
    throw ModelValidityError("detuning is resonant with a pair shift; the perturbative model is invalid");
  }
  return -omega * omega * shift / (delta * (delta - shift));
}

}  // namespace

double effective_j(const LatticeSpec& spec, const DriveConfig& drive, int i, int j) {
  const double delta = drive.detuning(spec);
  return pair_exchange(drive.omega, delta, pair_shift(spec, i, j), drive.linewidth());
}

double effective_j_resonant_form(const LatticeSpec& spec, const DriveConfig& drive, int i, int j) {
  const double dnn = nearest_neighbor_shift(spec);
  const double shift = pair_shift(spec, i, j);
  if (std::abs(dnn / 2.0 - shift) < 1e-9 * drive.linewidth()) {
    throw ModelValidityError("pair shift equals half the nearest-neighbour shift");
  }
  // 1 - f = -shift / (dnn/2 - shift)
  return -(2.0 * drive.omega * drive.omega / dnn) * shift / (dnn / 2.0 - shift);
}

double effective_light_shift(const LatticeSpec& spec, const DriveConfig& drive, int i, Truncation truncation) {
  if (i < 0 || i >= spec.n_sites) throw ConfigError("site", "index out of range");
  const double delta = drive.detuning(spec);
  const double w2 = drive.omega * drive.omega;
  const PairShiftTable shifts(spec);
  // Each pair contributes J_ij - Omega^2/delta; truncated pairs keep only the second part.
  double s = (2 - spec.n_sites) * w2 / delta;
  for (int j = 0; j < spec.n_sites; ++j) {
    if (j == i) continue;
    if (truncation == Truncation::next_nearest && std::abs(i - j) > 2) continue;
    s += pair_exchange(drive.omega, delta, shifts(i, j), drive.linewidth());
  }
  return s;
}

double light_shift_table(int n_sites, double xi, int p, int i) {
  const double c = 2.0 / (2.0 - std::pow(xi, p));
  const int n = n_sites;
  if (i == 0 || i == n - 1) return 0.5 * (4.0 + c - n);
  if (i == 1 || i == n - 2) return 0.5 * (6.0 + c - n);
  return 0.5 * (6.0 + 2.0 * c - n);
}

EffectiveModel build_effective_model(const LatticeSpec& spec, const DriveConfig& drive, Truncation truncation) {
  spec.validate();
  const int n = spec.n_sites;
  EffectiveModel m;
  m.n_sites = n;
  m.truncation = truncation;
  m.omega = drive.omega;
  m.delta = drive.detuning(spec);
  m.delta_nn = nearest_neighbor_shift(spec);
  m.h2_amp = 2.0 * drive.omega * drive.omega / m.delta_nn;
  m.j = RMatrix::Zero(n, n);
  m.delta_ls = RVector::Zero(n);

  const PairShiftTable shifts(spec);
  const double w2 = drive.omega * drive.omega;
  const double w_d = drive.linewidth();
  for (int i = 0; i < n; ++i) {
    double ls = (2 - n) * w2 / m.delta;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (truncation == Truncation::next_nearest && std::abs(i - j) > 2) continue;
      const double jij = pair_exchange(drive.omega, m.delta, shifts(i, j), w_d);
      m.j(i, j) = jij;
      ls += jij;
    }
    m.delta_ls(i) = ls;
  }
  return m;
}

SparseOp build_h2_operator(const EffectiveModel& model, const BasisIndexer& basis) {
  if (basis.n_sites() != model.n_sites) throw ConfigError("basis", "site count mismatch");
  const long g = basis.index_of(0);
  std::vector<Triplet> t;
  for (int i = 0; i + 1 < model.n_sites && g >= 0; ++i) {
    const long d = basis.index_of(std::uint64_t{3} << i);
    if (d < 0) continue;
    t.emplace_back(d, g, model.h2_amp);
    t.emplace_back(g, d, model.h2_amp);
  }
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  SparseOp h(dim, dim);
  h.setFromTriplets(t.begin(), t.end());
  return h;
}

SparseOp build_effective_hamiltonian(const EffectiveModel& model, const BasisIndexer& basis) {
  if (basis.n_sites() != model.n_sites) throw ConfigError("basis", "site count mismatch");
  const int n = model.n_sites;
  std::vector<long> single(n);
  for (int i = 0; i < n; ++i) {
    single[i] = basis.index_of(std::uint64_t{1} << i);
    if (single[i] < 0) throw ConfigError("basis", "basis lacks single-excitation states");
  }
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(single[i], single[i], model.delta_ls(i));
    for (int j = 0; j < n; ++j) {
      if (j != i && model.j(i, j) != 0.0) t.emplace_back(single[i], single[j], model.j(i, j));
    }
  }
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  SparseOp h(dim, dim);
  h.setFromTriplets(t.begin(), t.end());
  return h + build_h2_operator(model, basis);
}

RydbergSpectrum rydberg_spectrum(const LatticeSpec& spec, const DriveConfig& drive) {
  spec.validate();
  const int n = spec.n_sites;
  const PairShiftTable shifts(spec);
  RydbergSpectrum out;
  out.v.assign(n + 1, 0.0);
  for (int k = 2; k <= n; ++k) {
    double add = 0.0;
    for (int i = 0; i < k - 1; ++i) add += shifts(i, k - 1);
    out.v[k] = out.v[k - 1] + add;
  }
  for (int k = 0; k + 2 <= n; ++k) {
    const double dv = (k == 0 ? 0.0 : shifts(0, k)) + shifts(0, k + 1);
    const double d2 = 0.5 * (out.v[k + 2] - out.v[k]);
    const double o2 = 2.0 * drive.omega * drive.omega / d2;
    const double w2 = std::sqrt(drive.gamma_r * drive.gamma_r + 2.0 * o2 * o2);
    out.anharmonicity.push_back(dv);
    out.two_photon_detuning.push_back(d2);
    out.two_photon_rabi.push_back(o2);
    out.two_photon_linewidth.push_back(w2);
    out.blockaded.push_back(dv > w2);
  }
  return out;
}

}  // namespace ryd
