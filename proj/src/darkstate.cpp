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

#include "rydpump/darkstate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rydpump/entanglement.hpp"
#include "rydpump/states.hpp"

namespace ryd {

RMatrix hxy_matrix_n1(const EffectiveModel& model) {
  RMatrix h = model.j;
  h.diagonal() = model.delta_ls;
  return h;
}

std::string to_string(DarkFamily f) { return f == DarkFamily::set1 ? "set1" : "set2"; }

std::vector<DarkFamily> families_for(int n_sites) {
  std::vector<DarkFamily> out;
  if (n_sites >= 4 && (n_sites - 4) % 6 == 0) out.push_back(DarkFamily::set1);
  if (n_sites >= 6 && (n_sites - 6) % 10 == 0) out.push_back(DarkFamily::set2);
  return out;
}

RVector family_pattern(DarkFamily family, int n_sites) {
  static const int p1[6] = {0, 1, 1, 0, -1, -1};
  static const int p2[10] = {0, 1, 1, 1, 1, 0, -1, -1, -1, -1};
  RVector v(n_sites);
  for (int i = 0; i < n_sites; ++i) v(i) = family == DarkFamily::set1 ? p1[i % 6] : p2[i % 10];
  return v;
}

int family_k(DarkFamily family, int n_sites) {
  if (family == DarkFamily::set1) return 2 + 4 * ((n_sites - 4) / 6);
  return 4 + 8 * ((n_sites - 6) / 10);
}

bool matches_pattern(const RVector& v, const RVector& pattern, double tol) {
  if (v.size() != pattern.size() || v.norm() == 0.0 || pattern.norm() == 0.0) return false;
  const RVector a = v / v.norm();
  const RVector b = pattern / pattern.norm();
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff()) < tol;
}

DarkScanResult find_dark_states(const RMatrix& h, const std::vector<int>& reservoir, double threshold) {
  if (reservoir.empty()) throw ConfigError("reservoir", "needs at least one site");
  const auto n = h.rows();
  for (int b : reservoir) {
    if (b < 0 || b >= n) throw ConfigError("reservoir", "site index out of range");
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  DarkScanResult out;
  out.energies = es.eigenvalues();
  out.vectors = es.eigenvectors();
  const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
  const double cluster_tol = 1e-9 * scale;

  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && out.energies(end) - out.energies(end - 1) < cluster_tol) ++end;
    const Eigen::Index width = end - start;
    const RMatrix block = out.vectors.middleCols(start, width);
    RMatrix rows(static_cast<Eigen::Index>(reservoir.size()), width);
    for (std::size_t r = 0; r < reservoir.size(); ++r) rows.row(static_cast<Eigen::Index>(r)) = block.row(reservoir[r]);
    Eigen::JacobiSVD<RMatrix> svd(rows, Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    for (Eigen::Index c = 0; c < width; ++c) {
      const double sigma = c < sv.size() ? sv(c) : 0.0;
      if (sigma >= threshold) continue;
      RVector v = block * svd.matrixV().col(c);
      v /= v.norm();
      Eigen::Index big;
      v.cwiseAbs().maxCoeff(&big);
      if (v(big) < 0) v = -v;
      double boundary = 0.0;
      for (int b : reservoir) boundary = std::max(boundary, std::abs(v(b)));
      if (boundary >= threshold) continue;
      const double e = v.dot(h * v);
      out.dark_states.push_back(v);
      out.dark_energies.push_back(e);
      out.dark_residuals.push_back((h * v - e * v).norm() / scale);
      out.max_boundary_amplitude = std::max(out.max_boundary_amplitude, boundary);
      std::optional<DarkFamily> fam;
      for (DarkFamily f : families_for(static_cast<int>(n))) {
        if (matches_pattern(v, family_pattern(f, static_cast<int>(n)))) fam = f;
      }
      out.dark_family.push_back(fam);
    }
    start = end;
  }
  out.unique = out.dark_states.size() == 1;
  return out;
}

std::string to_string(ReservoirRule r) { return r == ReservoirRule::edges ? "edges" : "zeros"; }

ReservoirRule reservoir_rule_from_string(const std::string& s) {
  if (s == "edges") return ReservoirRule::edges;
  if (s == "zeros") return ReservoirRule::zeros;
  throw ConfigError("scan.rule", "expected edges or zeros, got " + s);
}

std::vector<int> reservoir_for(ReservoirRule rule, int n_sites, std::optional<DarkFamily> family) {
  if (rule == ReservoirRule::edges || !family) return {0, n_sites - 1};
  const RVector p = family_pattern(*family, n_sites);
  std::vector<int> out;
  for (int i = 0; i < n_sites; ++i) {
    if (p(i) == 0.0) out.push_back(i);
  }
  return out;
}

namespace {

// Scan lattice: a0/d_B = 0.13, Omega = 100; H is divided by J.
RMatrix scan_matrix(int n, double xi) {
  DriveConfig drive = DriveConfig::with_reservoir(n, 100.0, {0, n - 1});
  const LatticeSpec spec = lattice_for_drive(n, 0.13, xi, drive);
  const EffectiveModel model = build_effective_model(spec, drive, Truncation::next_nearest);
  return hxy_matrix_n1(model) / model.j_scale();
}

std::vector<ScalingRow> scan_one(int n, double xi, ReservoirRule rule) {
  const RMatrix h = scan_matrix(n, xi);
  std::vector<ScalingRow> rows;
  std::vector<std::optional<DarkFamily>> fams;
  for (DarkFamily f : families_for(n)) fams.emplace_back(f);
  if (fams.empty()) fams.emplace_back(std::nullopt);

  for (const auto& fam : fams) {
    ScalingRow row;
    row.n = n;
    row.xi = xi;
    row.rule = rule;
    row.family = fam;
    row.k_model = fam ? family_k(*fam, n) : 0;
    const std::vector<int> res = reservoir_for(rule, n, fam);
    const DarkScanResult scan = find_dark_states(h, res);
    row.n_dark = static_cast<int>(scan.dark_states.size());
    std::optional<std::size_t> pick;
    for (std::size_t d = 0; d < scan.dark_states.size(); ++d) {
      if (fam && scan.dark_family[d] == fam) pick = d;
    }
    if (!pick && !fam && scan.dark_states.size() == 1) pick = 0;
    if (!pick) {
      row.delta = std::nan("");
      rows.push_back(row);
      continue;
    }
    const RVector& v = scan.dark_states[*pick];
    row.energy = scan.dark_energies[*pick];
    row.pattern_match = fam && matches_pattern(v, family_pattern(*fam, n));
    const double vmax = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > 1e-8 * vmax) ++row.k;
    }
    std::vector<bool> in_b(n, false);
    for (int b : res) in_b[b] = true;
    std::vector<double> amps;
    for (int i = 0; i < n; ++i) {
      if (!in_b[i]) amps.push_back(std::abs(v(i)));
    }
    row.n_a = static_cast<int>(amps.size());
    CVector a(row.n_a);
    for (int i = 0; i < row.n_a; ++i) a(i) = amps[i];
    const WProjectorBasis basis(register_depth_for(std::max(2, row.n_a)));
    WitnessReport rep = certify(SingleExcitationState::from_site_amplitudes(a), basis);
    row.delta = rep.delta;
    row.k_m = rep.k_min;
    row.ambiguity_flags = rep.ambiguity_flags;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<ScalingRow> scaling_scan(const std::vector<int>& n_list, double xi, ReservoirRule rule, int workers) {
  for (int n : n_list) {
    if (n < 2 || n > 512) throw ConfigError("scan.n_list", "N must lie in 2..512");
  }
  std::vector<std::vector<ScalingRow>> parts(n_list.size());
  std::vector<std::string> errors(n_list.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t k = next.fetch_add(1); k < n_list.size(); k = next.fetch_add(1)) {
      try {
        parts[k] = scan_one(n_list[k], xi, rule);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<ScalingRow> out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!errors[k].empty()) throw NumericalError("scaling scan failed at N=" + std::to_string(n_list[k]) + ": " + errors[k]);
    out.insert(out.end(), parts[k].begin(), parts[k].end());
  }
  return out;
}

TruncationReport truncation_error_report(const LatticeSpec& spec, const DriveConfig& drive) {
  spec.validate();
  const int n = spec.n_sites;
  TruncationReport rep;
  rep.n = n;
  rep.xi = spec.xi;
  const EffectiveModel m = build_effective_model(spec, drive, Truncation::full);
  for (int i = 0; i < n; ++i) {
    double tail = 0.0;
    for (int j = i + 3; j < n; ++j) {
      tail += std::abs(m.j(i, j));
      if (i + 1 < n) rep.max_tail_ratio = std::max(rep.max_tail_ratio, std::abs(m.j(i, j)) / std::abs(m.j(i, i + 1)));
    }
    if (i + 2 < n) {
      const double ref = std::min(std::abs(m.j(i, i + 1)), std::abs(m.j(i, i + 2)));
      rep.tail_sum_ratio = std::max(rep.tail_sum_ratio, tail / ref);
    }
  }
  if (n >= 4) rep.shift_ratio = pair_shift(spec, 0, 3) / pair_shift(spec, 0, 1);
  rep.negligible = rep.tail_sum_ratio < 1e-2;
  return rep;
}

}  // namespace ryd
