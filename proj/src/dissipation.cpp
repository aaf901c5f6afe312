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

#include "rydpump/dissipation.hpp"

#include <cmath>

namespace ryd {

std::vector<Jump> lindblad_jumps(const DriveConfig& drive, const BasisIndexer& basis) {
  const int n = basis.n_sites();
  drive.validate(n);
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  std::vector<Jump> out;
  for (int i = 0; i < n; ++i) {
    const double rate = drive.gamma_site[i];
    if (rate < 0.0) throw ConfigError("drive.gamma_site", "negative rate");
    if (rate == 0.0) continue;
    std::vector<Triplet> t;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const std::uint64_t m = basis.mask(k);
      if (!((m >> i) & 1U)) continue;
      const long target = basis.index_of(m ^ (std::uint64_t{1} << i));
      if (target < 0) throw ConfigError("basis", "decay leaves the basis");
      t.emplace_back(target, k, 1.0);
    }
    SparseOp op(dim, dim);
    op.setFromTriplets(t.begin(), t.end());
    out.push_back({rate, i, std::move(op)});
  }
  return out;
}

CMatrix lindblad_dissipator(const std::vector<Jump>& jumps, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const Jump& j : jumps) {
    const SparseOp ldl = SparseOp(j.op.adjoint()) * j.op;
    const CMatrix lr = j.op * rho;
    out += j.rate * (lr * j.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

void DressingConfig::validate() const {
  if (!(gamma_e > 0.0)) throw ConfigError("dressing.gamma_e", "must be positive");
  if (!(omega_d >= 0.0)) throw ConfigError("dressing.omega_d", "must be non-negative");
  if (!(gamma_r >= 0.0)) throw ConfigError("dressing.gamma_r", "must be non-negative");
}

double effective_decay_rate(const DressingConfig& cfg) {
  cfg.validate();
  const double ge = cfg.gamma_e / 2.0;
  const double gr = cfg.gamma_r / 2.0;
  const double geff = gr + ge * cfg.omega_d * cfg.omega_d / (cfg.delta_d * cfg.delta_d + ge * ge);
  return 2.0 * geff;
}

std::vector<BlochSample> integrate_bloch(const DressingConfig& cfg, double t_final, double dt, int sample_every) {
  cfg.validate();
  if (!(t_final > 0.0)) throw ConfigError("t_final", "must be positive");
  if (!(dt > 0.0) || sample_every < 1) throw ConfigError("dt", "must be positive");
  const double ge = cfg.gamma_e / 2.0;
  const double gr = cfg.gamma_r / 2.0;
  const double fastest = std::max({ge, cfg.omega_d, std::abs(cfg.delta_d)});
  if (dt * fastest >= 0.1) throw NumericalError("Bloch step too coarse for the fastest rate");

  // d/dt (s_ge, s_gr)
  auto rhs = [&](cplx se, cplx sr, cplx& dse, cplx& dsr) {
    dse = (-ge + kI * cfg.delta_d) * se + kI * cfg.omega_d * sr;
    dsr = -gr * sr + kI * cfg.omega_d * se;
  };
  const auto steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const double h = t_final / static_cast<double>(steps);
  cplx se = 0.0, sr = 1.0;
  std::vector<BlochSample> out;
  out.push_back({0.0, se, sr, std::norm(sr)});
  for (long k = 1; k <= steps; ++k) {
    cplx k1e, k1r, k2e, k2r, k3e, k3r, k4e, k4r;
    rhs(se, sr, k1e, k1r);
    rhs(se + 0.5 * h * k1e, sr + 0.5 * h * k1r, k2e, k2r);
    rhs(se + 0.5 * h * k2e, sr + 0.5 * h * k2r, k3e, k3r);
    rhs(se + h * k3e, sr + h * k3r, k4e, k4r);
    se += h / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
    sr += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    if (k % sample_every == 0 || k == steps) out.push_back({k * h, se, sr, std::norm(sr)});
  }
  return out;
}

double fit_decay_rate(const std::vector<BlochSample>& samples) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (!(s.population > 0.0)) continue;
    const double y = std::log(s.population);
    st += s.t;
    sy += y;
    stt += s.t * s.t;
    sty += s.t * y;
    ++n;
  }
  if (n < 2) throw NumericalError("not enough samples for a decay fit");
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return -slope;
}

}  // namespace ryd
