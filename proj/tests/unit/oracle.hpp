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

// Independent reference implementations used by the unit tests.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline double sixth_root_of_three() { return std::pow(3.0, 1.0 / 6.0); }

// Triangle strip from the distance rules alone: sites i and i+1 at a0, i and i+2 at xi*a0.
inline std::vector<Eigen::Vector2d> strip(int n, double a0, double xi) {
  std::vector<Eigen::Vector2d> p(n);
  const double h = a0 * std::sqrt(1.0 - xi * xi / 4.0);
  for (int i = 0; i < n; ++i) p[i] = {i * xi * a0 / 2.0, (i % 2) * h};
  return p;
}

inline double shift(int n, double a0, double xi, double cp, int i, int j, int pw = 6) {
  const auto p = strip(n, a0, xi);
  return cp * std::pow((p[i] - p[j]).norm(), -pw);
}

// Brute-force partial trace over a dense 2^N matrix; bit i of an index is site i.
inline Mat partial_trace(const Mat& rho, int n, const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  Mat out = Mat::Zero(1 << k, 1 << k);
  for (int a = 0; a < (1 << n); ++a)
    for (int b = 0; b < (1 << n); ++b) {
      bool same = true;
      for (int s = 0; s < n && same; ++s) {
        bool kept = false;
        for (int q : keep) kept |= q == s;
        if (!kept && (((a >> s) & 1) != ((b >> s) & 1))) same = false;
      }
      if (!same) continue;
      int ra = 0, rb = 0;
      for (int q = 0; q < k; ++q) {
        ra |= ((a >> keep[q]) & 1) << q;
        rb |= ((b >> keep[q]) & 1) << q;
      }
      out(ra, rb) += rho(a, b);
    }
  return out;
}

inline Mat random_density(int d, std::mt19937_64& gen, int rank = -1) {
  std::normal_distribution<double> g;
  const int r = rank < 0 ? d : rank;
  Mat a(d, r);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = cplx(g(gen), g(gen));
  Mat rho = a * a.adjoint();
  return rho / rho.trace();
}

// Sylvester Hadamard matrix H_{2^m}; entry (i, j) = (-1)^{popcount(i & j)}.
inline Eigen::MatrixXd hadamard(int m) {
  const int n = 1 << m;
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = (__builtin_popcount(i & j) % 2) ? -1.0 : 1.0;
  return h;
}

// Delta for a normalized single-excitation amplitude vector over 2^m sites.
inline double delta_n1(const Eigen::VectorXcd& a, int m) {
  const Eigen::MatrixXd h = hadamard(m) / std::sqrt(double(1 << m));
  double d = 0.0;
  for (int i = 0; i < h.rows(); ++i) {
    const double pi = std::norm(h.row(i).cast<cplx>().dot(a));
    d += pi - pi * pi;
  }
  return d;
}

}  // namespace oracle
