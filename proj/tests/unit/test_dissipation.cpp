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

#include <random>

#include "oracle.hpp"
#include "rydpump/dissipation.hpp"

using namespace ryd;

TEST_CASE("jumps") {
  const DriveConfig d1 = DriveConfig::with_reservoir(1, 1.0, {0});
  const auto j1 = lindblad_jumps(d1, BasisIndexer::full(1));
  REQUIRE(j1.size() == 1);
  CHECK(j1[0].rate == 1.0);
  CMatrix rr = CMatrix::Zero(2, 2);
  rr(1, 1) = 1.0;
  const CMatrix dot = lindblad_dissipator(j1, rr);
  CHECK(std::abs(dot(1, 1) + 1.0) < 1e-15);
  CHECK(std::abs(dot(0, 0) - 1.0) < 1e-15);

  const DriveConfig d2 = DriveConfig::with_reservoir(2, 1.0, {0}, 1e-4, 1.0);
  const auto j2 = lindblad_jumps(d2, BasisIndexer::full(2));
  REQUIRE(j2.size() == 2);
  const CMatrix op = CMatrix(j2[0].op);
  CHECK(j2[0].site == 0);
  CHECK(std::abs(op(0b10, 0b11) - 1.0) < 1e-15);
  CHECK(op.cwiseAbs().sum() == doctest::Approx(2.0));
  CHECK(j2[1].rate == 1e-4);

  std::mt19937_64 gen(1);
  std::normal_distribution<double> g;
  const auto j4 = lindblad_jumps(DriveConfig::with_reservoir(4, 1.0, {0, 3}), BasisIndexer::full(4));
  for (int trial = 0; trial < 100; ++trial) {
    CMatrix a(16, 16);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) a(r, c) = cplx(g(gen), g(gen));
    const CMatrix h = a + a.adjoint();
    CHECK(std::abs(lindblad_dissipator(j4, h).trace()) < 1e-12);
  }
  DriveConfig neg = d2;
  neg.gamma_site[0] = -1.0;
  CHECK_THROWS(lindblad_jumps(neg, BasisIndexer::full(2)));
}

TEST_CASE("effective decay rate") {
  CHECK(effective_decay_rate({0.0, 0.0, 1e4, 1.0}) == doctest::Approx(1.0));
  const double small = effective_decay_rate({10.0, 0.0, 1e4, 1.0});
  CHECK(small == doctest::Approx(1.0 + 4 * 100.0 / 1e4).epsilon(1e-6));
  const double gamma = effective_decay_rate({1e3, 0.0, 1e4, 1.0});
  CHECK(gamma >= std::pow(10.0, 2.5));
  CHECK(gamma <= std::pow(10.0, 3.5));
  double prev = 0.0;
  for (double od : {0.0, 10.0, 100.0, 1e3}) {
    const double r = effective_decay_rate({od, 0.0, 1e4, 1.0});
    CHECK(r > prev);
    prev = r;
  }
  CHECK(effective_decay_rate({1e3, 5e3, 1e4, 1.0}) < effective_decay_rate({1e3, 1e3, 1e4, 1.0}));
}

TEST_CASE("bloch integration") {
  const auto free = integrate_bloch({0.0, 0.0, 1e4, 1.0}, 3.0, 1e-5, 1000);
  for (const auto& s : free) CHECK(std::abs(s.sigma_gr - std::exp(-0.5 * s.t)) < 1e-10);

  for (double ratio : {1e-3, 1e-2, 1e-1}) {
    const DressingConfig cfg{ratio * 1e4, 0.0, 1e4, 1.0};
    const double gamma = effective_decay_rate(cfg);
    const double dt = 0.05 / std::max(cfg.gamma_e / 2, cfg.omega_d);
    const auto s = integrate_bloch(cfg, 5.0 / gamma, dt, 10);
    CHECK(std::abs(fit_decay_rate(s) - gamma) / gamma < 0.1);
  }
  const DressingConfig hard{0.5e4, 0.0, 1e4, 1.0};
  const auto s = integrate_bloch(hard, 5.0 / effective_decay_rate(hard), 1e-6, 10);
  CHECK(std::abs(fit_decay_rate(s) - effective_decay_rate(hard)) / effective_decay_rate(hard) > 0.1);

  CHECK_THROWS(integrate_bloch({1e3, 0.0, 1e4, 1.0}, 1.0, 1e-3));
}
