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

#include "rydpump/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace ryd {

double fidelity(const QuantumState& state, const QuantumState& target) {
  if (target.kind() != QuantumState::Kind::pure) throw ConfigError("target", "fidelity target must be pure");
  if (state.n_sites() != target.n_sites()) throw ConfigError("state", "dimension mismatch with target");
  const CVector& psi = target.amplitudes();
  if (state.kind() == QuantumState::Kind::pure) return std::norm(psi.dot(state.amplitudes()));
  return (psi.adjoint() * state.matrix() * psi)(0, 0).real();
}

namespace {

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double concurrence(const CMatrix& rho2) {
  if (rho2.rows() != 4 || rho2.cols() != 4) throw ConfigError("rho", "concurrence needs a 4x4 matrix");
  const Physicality ph = physicality(rho2);
  if (ph.trace_error > 1e-7 || ph.hermiticity_error > 1e-7 || ph.min_eigenvalue < -1e-7) {
    throw ConfigError("rho", "not a valid two-qubit density matrix");
  }
  CMatrix yy = CMatrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const CMatrix flipped = yy * rho2.conjugate() * yy;
  const CMatrix s = psd_sqrt(rho2);
  const CMatrix r = s * flipped * s;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  RVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(lam.data(), lam.data() + 4, std::greater<>());
  return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

WProjectorBasis::WProjectorBasis(int m) : m_(m) {
  if (m < 1 || m > 20) throw ConfigError("m", "recursion depth must be in 1..20");
  n_m_ = 1 << m;
  vectors_ = RMatrix::Ones(1, 1);
  const double r = 1.0 / std::sqrt(2.0);
  for (int level = 1; level <= m; ++level) {
    const Eigen::Index h = vectors_.rows();
    RMatrix next(2 * h, 2 * h);
    next << r * vectors_, r * vectors_, r * vectors_, -r * vectors_;
    vectors_ = std::move(next);
  }
}

CMatrix WProjectorBasis::projector(int i) const {
  if (n_m_ > kDenseSiteLimit) throw ConfigError("m", "register too large for a dense projector");
  if (i < 0 || i >= n_m_) throw ConfigError("i", "projector index out of range");
  const auto d = Eigen::Index{1} << n_m_;
  CVector v = CVector::Zero(d);
  for (int j = 0; j < n_m_; ++j) v(Eigen::Index{1} << j) = vectors_(i, j);
  return v * v.adjoint();
}

WProjectorBasis build_w_basis(int m) { return WProjectorBasis(m); }

int register_depth_for(int n_a) {
  if (n_a < 1) throw ConfigError("n_a", "register needs at least one site");
  int m = 1;
  while ((1 << m) < n_a) ++m;
  return m;
}

namespace {

// Walsh-basis variances of a normalized single-excitation block.
void fill_delta(WitnessReport& rep, const CMatrix& rho1, const WProjectorBasis& basis) {
  const int nm = basis.register_size();
  CMatrix padded = CMatrix::Zero(nm, nm);
  padded.topLeftCorner(rho1.rows(), rho1.cols()) = rho1;
  const CMatrix w = basis.vectors().cast<cplx>();
  const CMatrix q = w * padded * w.transpose();
  rep.projector_expectations.resize(nm);
  rep.delta = 0.0;
  for (int i = 0; i < nm; ++i) {
    const double qi = q(i, i).real();
    rep.projector_expectations[i] = qi;
    rep.delta += qi * (1.0 - qi);
  }
}

WitnessReport witness_from_block(const CMatrix& block, const ExcitationStats& st, int n_a,
                                 const WProjectorBasis& basis) {
  if (n_a > basis.register_size()) throw ConfigError("basis", "register smaller than the probed site set");
  WitnessReport rep;
  rep.n_a = n_a;
  rep.n_m = basis.register_size();
  rep.p0 = st.p0;
  rep.p1 = st.p1;
  rep.p_ge2 = st.p_ge2;
  if (!(st.p1 > 1e-300)) {
    rep.projector_expectations.assign(rep.n_m, 0.0);
    rep.delta = 0.0;
    return rep;
  }
  fill_delta(rep, block / block.trace().real(), basis);
  rep.y_c = n_a < 2 ? 0.0 : (2.0 * n_a / (n_a - 1.0)) * st.p_ge2 * st.p0 / (st.p1 * st.p1);
  return rep;
}

}  // namespace

WitnessReport witness(const QuantumState& state, const WProjectorBasis& basis) {
  return witness_from_block(single_excitation_block(state), excitation_statistics(state), state.n_sites(), basis);
}

WitnessReport witness(const SingleExcitationState& state, const WProjectorBasis& basis) {
  return witness_from_block(single_excitation_block(state), excitation_statistics(state), state.n_sites(), basis);
}

double delta_of_amplitudes(const CVector& site_amplitudes, const WProjectorBasis& basis) {
  const int nm = basis.register_size();
  if (site_amplitudes.size() > nm) throw ConfigError("amplitudes", "longer than the register");
  const double norm2 = site_amplitudes.squaredNorm();
  if (!(norm2 > 0.0)) throw ConfigError("amplitudes", "zero vector");
  std::vector<cplx> a(nm, 0.0);
  for (Eigen::Index j = 0; j < site_amplitudes.size(); ++j) a[j] = site_amplitudes(j);
  walsh_hadamard(a);
  double s = 0.0;
  for (const cplx& x : a) {
    const double q = std::norm(x) / (nm * norm2);
    s += q * q;
  }
  return 1.0 - s;
}

namespace {

// Largest Sum (H a)^4 over +-1 vectors supported on s sites including site 0.
double explicit_search(int s, int n_m) {
  std::int64_t best = 0;
  std::vector<std::int64_t> a(n_m);
  std::vector<int> pos;
  const std::uint32_t rest = (std::uint32_t{1} << (n_m - 1));
  for (std::uint32_t m = 0; m < rest; ++m) {
    if (std::popcount(m) != s - 1) continue;
    pos.assign(1, 0);
    for (int b = 0; b < n_m - 1; ++b) {
      if ((m >> b) & 1U) pos.push_back(b + 1);
    }
    const std::uint32_t n_signs = std::uint32_t{1} << (s - 1);
    for (std::uint32_t sg = 0; sg < n_signs; ++sg) {
      std::fill(a.begin(), a.end(), 0);
      a[0] = 1;
      for (int k = 1; k < s; ++k) a[pos[k]] = ((sg >> (k - 1)) & 1U) ? -1 : 1;
      walsh_hadamard(a);
      std::int64_t s4 = 0;
      for (std::int64_t x : a) s4 += x * x * x * x;
      best = std::max(best, s4);
    }
  }
  const double norm = static_cast<double>(n_m) * s;
  return 1.0 - static_cast<double>(best) / (norm * norm);
}

// Contiguous all-plus blocks, minimized over the offset.
double contiguous_search(int s, int n_m) {
  double best = 1.0;
  std::vector<double> a(n_m);
  for (int off = 0; off + s <= n_m; ++off) {
    std::fill(a.begin(), a.end(), 0.0);
    for (int k = 0; k < s; ++k) a[off + k] = 1.0;
    walsh_hadamard(a);
    double s4 = 0.0;
    for (double x : a) s4 += x * x * x * x;
    const double norm = static_cast<double>(n_m) * s;
    best = std::min(best, 1.0 - s4 / (norm * norm));
  }
  return best;
}

std::mutex& memo_mutex() {
  static std::mutex m;
  return m;
}

void check_tier(int s, int n_m) {
  if (n_m < 2 || !std::has_single_bit(static_cast<unsigned>(n_m))) {
    throw ConfigError("n_m", "register size must be a power of two >= 2");
  }
  if (s < 1 || s > n_m) throw ConfigError("k_minus_1", "must lie in 1..N_m");
}

}  // namespace

double bound_delta_pure(int k_minus_1, int n_m) {
  check_tier(k_minus_1, n_m);
  if (k_minus_1 == n_m) return 0.0;
  static std::map<std::pair<int, int>, double> memo;
  std::lock_guard<std::mutex> lock(memo_mutex());
  const auto key = std::make_pair(n_m, k_minus_1);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  const double v = n_m <= 16 ? explicit_search(k_minus_1, n_m) : contiguous_search(k_minus_1, n_m);
  memo.emplace(key, v);
  return v;
}

double BoundaryCurve::at(double y_c) const {
  if (y.empty()) throw NumericalError("empty boundary curve");
  if (y_c <= y.front()) return delta.front();
  if (y_c >= y.back()) return delta.back();
  const auto it = std::upper_bound(y.begin(), y.end(), y_c);
  const std::size_t k = static_cast<std::size_t>(it - y.begin());
  const double w = (y_c - y[k - 1]) / (y[k] - y[k - 1]);
  return delta[k - 1] + w * (delta[k] - delta[k - 1]);
}

namespace {

struct PlanePoint {
  double y;
  double d;
};

BoundaryCurve lower_envelope(std::vector<PlanePoint> pts) {
  for (PlanePoint& p : pts) p.d = std::max(0.0, p.d);
  std::sort(pts.begin(), pts.end(), [](const PlanePoint& a, const PlanePoint& b) {
    return a.y < b.y || (a.y == b.y && a.d < b.d);
  });
  std::vector<PlanePoint> hull;
  for (const PlanePoint& p : pts) {
    while (hull.size() >= 2) {
      const PlanePoint& a = hull[hull.size() - 2];
      const PlanePoint& b = hull.back();
      const double cross = (b.y - a.y) * (p.d - a.d) - (b.d - a.d) * (p.y - a.y);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  BoundaryCurve c;
  double running = hull.front().d;
  for (const PlanePoint& p : hull) {
    running = std::min(running, p.d);
    c.y.push_back(p.y);
    c.delta.push_back(running);
  }
  return c;
}

// Products of contiguous clusters of size s, each in sqrt(1-x)|G> + sqrt(x)|W>.
// The first cluster carries weight u, the others v.
std::vector<PlanePoint> product_family(int s, int n_m, int grid) {
  std::vector<int> sizes;
  for (int r = n_m; r > 0; r -= sizes.back()) sizes.push_back(std::min(s, r));
  const int k = static_cast<int>(sizes.size());
  std::vector<PlanePoint> pts;
  std::vector<double> amp(n_m);
  const double yfac = 2.0 * n_m / (n_m - 1.0);
  for (int iu = 0; iu <= grid; ++iu) {
    const double u = static_cast<double>(iu) / grid;
    for (int iv = 0; iv <= (k > 1 ? grid : 0); ++iv) {
      const double v = static_cast<double>(iv) / grid;
      const double pu0 = 1.0 - u, pv0 = 1.0 - v;
      const double p0 = pu0 * std::pow(pv0, k - 1);
      double p1 = u * std::pow(pv0, k - 1);
      if (k > 1) p1 += (k - 1) * v * pu0 * std::pow(pv0, k - 2);
      if (p1 < 1e-14) continue;
      const double p2 = std::max(0.0, 1.0 - p0 - p1);
      // Amplitude ratios only matter after normalization.
      const double first = std::sqrt(u) * std::sqrt(pv0) / std::sqrt(static_cast<double>(sizes[0]));
      int site = 0;
      for (int c = 0; c < k; ++c) {
        const double a = c == 0 ? first : std::sqrt(v) * std::sqrt(pu0) / std::sqrt(static_cast<double>(sizes[c]));
        for (int j = 0; j < sizes[c]; ++j) amp[site++] = a;
      }
      double norm2 = 0.0;
      for (double a : amp) norm2 += a * a;
      if (!(norm2 > 0.0)) continue;
      std::vector<double> h = amp;
      walsh_hadamard(h);
      double s4 = 0.0;
      for (double x : h) {
        const double q = x * x / (n_m * norm2);
        s4 += q * q;
      }
      pts.push_back({yfac * p2 * p0 / (p1 * p1), 1.0 - s4});
    }
  }
  return pts;
}

}  // namespace

const BoundaryCurve& boundary_curve(int n_m, int k_minus_1, int grid) {
  check_tier(k_minus_1, n_m);
  if (grid < 2) throw ConfigError("grid", "need at least 2 grid points");
  const double at_zero = bound_delta_pure(k_minus_1, n_m);
  static std::map<std::tuple<int, int, int>, std::unique_ptr<BoundaryCurve>> memo;
  std::lock_guard<std::mutex> lock(memo_mutex());
  const auto key = std::make_tuple(n_m, k_minus_1, grid);
  auto it = memo.find(key);
  if (it != memo.end()) return *it->second;
  std::vector<PlanePoint> pts = product_family(k_minus_1, n_m, grid);
  pts.push_back({0.0, at_zero});
  auto curve = std::make_unique<BoundaryCurve>(lower_envelope(std::move(pts)));
  const BoundaryCurve& ref = *curve;
  memo.emplace(key, std::move(curve));
  return ref;
}

double bound_delta(int k_minus_1, const WProjectorBasis& basis, double y_c) {
  const int n_m = basis.register_size();
  check_tier(k_minus_1, n_m);
  if (!(y_c >= 0.0)) throw ConfigError("y_c", "must be non-negative");
  if (k_minus_1 == n_m) return 0.0;
  if (y_c == 0.0) return bound_delta_pure(k_minus_1, n_m);
  return boundary_curve(n_m, k_minus_1).at(y_c);
}

void attach_bounds(WitnessReport& report, const WProjectorBasis& basis) {
  report.bounds.clear();
  if (!report.y_c) return;
  for (int s = 1; s <= basis.register_size(); ++s) report.bounds.push_back(bound_delta(s, basis, *report.y_c));
}

int certify_depth(WitnessReport& report) {
  report.ambiguity_flags.clear();
  for (std::size_t s = 0; s + 1 < report.bounds.size(); ++s) {
    if (report.bounds[s] < report.bounds[s + 1]) report.ambiguity_flags.push_back(static_cast<int>(s + 1));
  }
  int t = 0;
  if (report.y_c) {
    while (t < static_cast<int>(report.bounds.size()) && report.delta < report.bounds[t] - 1e-12) ++t;
  }
  report.k_min = std::min(1 + t, std::max(1, report.n_a));
  return report.k_min;
}

WitnessReport certify(const QuantumState& state, const WProjectorBasis& basis) {
  WitnessReport r = witness(state, basis);
  attach_bounds(r, basis);
  certify_depth(r);
  return r;
}

WitnessReport certify(const SingleExcitationState& state, const WProjectorBasis& basis) {
  WitnessReport r = witness(state, basis);
  attach_bounds(r, basis);
  certify_depth(r);
  return r;
}

std::optional<double> stable_crossing_time(const std::vector<double>& times, const std::vector<double>& delta,
                                           const std::vector<std::optional<double>>& y_c, int k_minus_1,
                                           const WProjectorBasis& basis) {
  if (times.size() != delta.size() || times.size() != y_c.size()) throw ConfigError("series", "length mismatch");
  std::optional<double> since;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const bool below = y_c[k] && delta[k] < bound_delta(k_minus_1, basis, *y_c[k]) - 1e-12;
    if (!below) {
      since.reset();
    } else if (!since) {
      since = times[k];
    }
  }
  return since;
}

namespace {

VarianceBound variance_from_block(const CMatrix& block, int n_sites) {
  VarianceBound out;
  const WProjectorBasis basis(register_depth_for(std::max(2, n_sites)));
  const int n = basis.register_size();
  out.register_size = n;
  const double p1 = block.trace().real();
  if (!(p1 > 1e-300)) {
    out.coherence_form = (n - 1.0) / n;
    out.transverse_form = n / (n - 1.0);
    out.holds = true;
    return out;
  }
  const CMatrix rho1 = block / p1;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rho1.rows(); ++i)
    for (Eigen::Index j = i + 1; j < rho1.cols(); ++j) sum += std::abs(rho1(i, j));
  const double x = 2.0 * sum / (n - 1.0);
  out.mean_coherence = 2.0 * sum / (n * (n - 1.0));
  out.coherence_form = ((n - 1.0) / n) * (1.0 - x * x);
  out.transverse_form = (n / (n - 1.0)) * (1.0 - x * x);
  WitnessReport rep;
  fill_delta(rep, rho1, basis);
  out.delta = rep.delta;
  out.holds = out.delta <= out.coherence_form + 1e-12;
  return out;
}

}  // namespace

VarianceBound variance_bound(const QuantumState& state) {
  return variance_from_block(single_excitation_block(state), state.n_sites());
}

VarianceBound variance_bound(const SingleExcitationState& state) {
  return variance_from_block(single_excitation_block(state), state.n_sites());
}

}  // namespace ryd
