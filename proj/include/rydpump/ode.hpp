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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rydpump/types.hpp"

namespace ryd {

struct OdeOptions {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  double h_init = 0.0;  // 0 picks a starting step from the initial slope
  double h_min = 1e-14;
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 100'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;
};

namespace detail {

template <class M>
double scaled_error(const M& err, const M& y0, const M& y1, const OdeOptions& o) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < err.size(); ++k) {
    const double scale = o.abs_tol + o.rel_tol * std::max(std::abs(y0.data()[k]), std::abs(y1.data()[k]));
    worst = std::max(worst, std::abs(err.data()[k]) / scale);
  }
  return worst;
}

}  // namespace detail

// Adaptive Dormand-Prince 5(4) with element-wise max-norm error control.
// Steps land exactly on every entry of `out_times` (sorted, >= t0), where
// observe(t, y) is called.
template <class M, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& f, M y, double t0, const std::vector<double>& out_times, Observer&& observe,
                          const OdeOptions& opt = {}) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats stats;
  double t = t0;
  M k1 = f(t, y);
  ++stats.rhs_calls;
  double h = opt.h_init;
  if (h <= 0.0) {
    const double d0 = y.cwiseAbs().maxCoeff();
    const double d1 = k1.cwiseAbs().maxCoeff();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  h = std::min(h, opt.h_max);

  for (double target : out_times) {
    if (target < t - 1e-12) throw ConfigError("sample_times", "must be sorted and not before the start time");
    while (t < target) {
      if (stats.accepted + stats.rejected >= opt.max_steps) throw NumericalError("integrator step budget exhausted");
      bool last = false;
      double step = h;
      if (t + step >= target - 1e-12 * std::max(1.0, std::abs(target))) {
        step = target - t;
        last = true;
      }
      const M k2 = f(t + c2 * step, M(y + step * (a21 * k1)));
      const M k3 = f(t + c3 * step, M(y + step * (a31 * k1 + a32 * k2)));
      const M k4 = f(t + c4 * step, M(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
      const M k5 = f(t + c5 * step, M(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const M k6 = f(t + step, M(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      M y1 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const M k7 = f(t + step, y1);
      stats.rhs_calls += 6;
      const M err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = detail::scaled_error(err, y, y1, opt);
      if (!std::isfinite(en)) throw NumericalError("integrator produced a non-finite state");
      if (en <= 1.0) {
        t = last ? target : t + step;
        y = std::move(y1);
        k1 = k7;
        ++stats.accepted;
        const double grow = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (!last) h = std::min(step * grow, opt.h_max);
        else h = std::min(std::max(h, step * grow), opt.h_max);
      } else {
        ++stats.rejected;
        h = step * std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0);
        if (h < opt.h_min) throw NumericalError("step size fell below the minimum; tolerance cannot be met");
      }
    }
    observe(t, static_cast<const M&>(y));
  }
  return stats;
}

}  // namespace ryd
