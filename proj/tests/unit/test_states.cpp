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
#include "rydpump/io.hpp"
#include "rydpump/states.hpp"

using namespace ryd;

TEST_CASE("basis indexers") {
  const auto full = BasisIndexer::full(5);
  CHECK(full.dim() == 32);
  std::size_t total = 0;
  const int binom[] = {1, 5, 10, 10, 5, 1};
  for (int n = 0; n <= 5; ++n) {
    CHECK(full.subspace(n).size() == static_cast<std::size_t>(binom[n]));
    total += full.subspace(n).size();
  }
  CHECK(total == 32);

  const auto pump = BasisIndexer::pump_sector(5);
  CHECK(pump.dim() == 10);
  CHECK(pump.mask(0) == 0);
  for (int i = 0; i < 5; ++i) CHECK(pump.mask(1 + i) == (1U << i));
  for (int i = 0; i < 4; ++i) CHECK(pump.index_of(3ULL << i) == 6 + i);
  CHECK(pump.index_of(0b101) == -1);
  CHECK(BasisIndexer::single_excitation(5).dim() == 6);
}

TEST_CASE("partial trace examples") {
  // |g> on site 0, |r> on site 1.
  const QuantumState prod = QuantumState::basis_state(2, 0b10);
  const CMatrix r = partial_trace(prod, {1}).matrix();
  CHECK(std::abs(r(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(r(0, 0)) < 1e-15);

  const QuantumState bell = make_w_state(2, {0, 1});
  Eigen::SelfAdjointEigenSolver<CMatrix> es(partial_trace(bell, {0}).matrix());
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.5));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.5));

  const QuantumState w4 = make_w_state(4, {0, 1, 2, 3});
  const CMatrix m = partial_trace(w4, {0, 1}).matrix();
  CHECK(std::abs(m(0b01, 0b10) - 0.25) < 1e-15);
  CHECK(std::abs(m(0b00, 0b00) - 0.5) < 1e-15);
}

TEST_CASE("partial trace agrees with brute force and composes") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix rho = oracle::random_density(32, gen, 3);
    const QuantumState s = QuantumState::mixed(5, rho);
    const std::vector<int> keep{0, 2, 3};
    CHECK((partial_trace(s, keep).matrix() - oracle::partial_trace(rho, 5, keep)).cwiseAbs().maxCoeff() < 1e-14);
    // Trace out {1, 4} then site 2 of the remainder vs {1, 2, 4} at once.
    const QuantumState step = partial_trace(partial_trace(s, keep), {0, 2});
    const QuantumState once = partial_trace(s, {0, 3});
    CHECK((step.matrix() - once.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(partial_trace(s, {4}).matrix().trace() - 1.0) < 1e-12);
  }
  const QuantumState pure = make_w_state(3, {0, 1, 2});
  CHECK((partial_trace(pure, {0, 1}).matrix() - partial_trace(QuantumState::mixed(3, pure.density()), {0, 1}).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK_THROWS_AS(partial_trace(pure, {}), ConfigError);
  CHECK_THROWS_AS(partial_trace(pure, {3}), ConfigError);
}

TEST_CASE("excitation statistics") {
  auto st = excitation_statistics(QuantumState::ground(4));
  CHECK(st.p0 == 1.0);
  st = excitation_statistics(make_w_state(4, {0, 1, 2, 3}));
  CHECK(st.p1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.p0 == 0.0);
  CHECK(st.p_ge2 == 0.0);
  CVector psi = CVector::Zero(8);
  psi(0) = psi(0b011) = 1.0 / std::sqrt(2.0);
  st = excitation_statistics(QuantumState::pure(3, psi));
  CHECK(st.p0 == doctest::Approx(0.5));
  CHECK(st.p1 == 0.0);
  CHECK(st.p_ge2 == doctest::Approx(0.5));

  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    CVector a = oracle::random_density(5, gen, 1).col(0);
    const auto se = SingleExcitationState::from_site_amplitudes(a.tail(4) / a.tail(4).norm());
    const auto s = excitation_statistics(se);
    CHECK(s.p0 == 0.0);
    CHECK(s.p1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.p_ge2 == 0.0);
  }
}

TEST_CASE("w state construction") {
  const QuantumState w = make_w_state(6, {1, 2, 3, 4});
  for (int i = 1; i <= 4; ++i) CHECK(std::abs(w.amplitudes()(1 << i) - 0.5) < 1e-15);
  CHECK(std::abs(w.amplitudes()(1)) == 0.0);
  const QuantumState one = make_w_state(3, {2});
  CHECK(std::abs(one.amplitudes()(4) - 1.0) < 1e-15);
  CHECK_THROWS_AS(make_w_state(3, {}), ConfigError);
  CHECK_THROWS_AS(make_w_state(3, {0, 1}, {0.0, 0.0}), ConfigError);
  const QuantumState phased = make_w_state(2, {0, 1}, {1.0, cplx(0, 1)});
  CHECK(std::abs(phased.amplitudes()(2) - cplx(0, 1) / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("state validation and physicality") {
  CHECK_THROWS_AS(QuantumState::pure(2, CVector::Ones(4)), Error);
  CMatrix bad = CMatrix::Identity(4, 4);
  CHECK_THROWS_AS(QuantumState::mixed(2, bad), Error);
  bad = CMatrix::Identity(4, 4) / 4.0;
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(QuantumState::mixed(2, bad), Error);

  std::mt19937_64 gen(5);
  const CMatrix rho = oracle::random_density(8, gen);
  const Physicality ph = physicality(rho);
  CHECK(ph.trace_error < 1e-14);
  CHECK(ph.hermiticity_error < 1e-14);
  CHECK(ph.min_eigenvalue > 0.0);
  CHECK(purity(rho) <= 1.0 + 1e-9);
  CHECK(trace_distance(rho, rho) < 1e-14);
  const CMatrix a = QuantumState::basis_state(1, 0).density();
  const CMatrix b = QuantumState::basis_state(1, 1).density();
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
}

TEST_CASE("state json round trip") {
  std::mt19937_64 gen(9);
  const QuantumState m = QuantumState::mixed(2, oracle::random_density(4, gen));
  const QuantumState back = state_from_json(to_json(m));
  CHECK((back.matrix() - m.matrix()).cwiseAbs().maxCoeff() == 0.0);
  const QuantumState w = make_w_state(3, {0, 2});
  CHECK((state_from_json(to_json(w)).amplitudes() - w.amplitudes()).norm() == 0.0);
}
