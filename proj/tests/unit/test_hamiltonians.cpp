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

#include "oracle.hpp"
#include "rydpump/hamiltonians.hpp"

using namespace ryd;

namespace {

const double kXiDark = oracle::sixth_root_of_three();

struct Setup {
  DriveConfig drive;
  LatticeSpec spec;
  double wd, dnn, delta, j;
};

Setup setup(int n, double a0, double xi, double omega = 1e3) {
  Setup s;
  s.drive = DriveConfig::with_reservoir(n, omega, {0, n - 1});
  s.spec = lattice_for_drive(n, a0, xi, s.drive);
  s.wd = std::sqrt(1e-8 / 4 + 2 * omega * omega);
  s.dnn = s.wd * std::pow(a0, -6);
  s.delta = s.dnn / 2;
  s.j = 4 * omega * omega / s.dnn;
  return s;
}

// Main-text exchange from oracle geometry.
double j_main(const Setup& s, int i, int k) {
  const double om2 = s.drive.omega * s.drive.omega;
  const double dp = oracle::shift(s.spec.n_sites, s.spec.a0, s.spec.xi, s.wd, i, k);
  return om2 / s.delta - om2 / (s.delta - dp);
}

// Piecewise light shift in units of J (1-based edge / next-to-edge / bulk rows).
double piecewise(int n, double xi, int i) {
  const double c = 2.0 / (2.0 - std::pow(xi, 6));
  if (i == 0 || i == n - 1) return 0.5 * (4 + c - n);
  if (i == 1 || i == n - 2) return 0.5 * (6 + c - n);
  return 0.5 * (6 + 2 * c - n);
}

}  // namespace

TEST_CASE("full hamiltonian small cases") {
  auto s = setup(2, 0.5, 1.3, 7.0);
  const CMatrix h2 = CMatrix(build_full_hamiltonian(s.spec, s.drive));
  CHECK(h2.rows() == 4);
  CHECK((h2 - h2.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  const double d12 = oracle::shift(2, 0.5, 1.3, s.wd, 0, 1);
  CHECK(h2(0, 0).real() == 0.0);
  CHECK(h2(1, 1).real() == doctest::Approx(s.delta).epsilon(1e-12));
  CHECK(h2(2, 2).real() == doctest::Approx(s.delta).epsilon(1e-12));
  CHECK(h2(3, 3).real() == doctest::Approx(2 * s.delta - d12).epsilon(1e-12));
  CHECK(std::abs(h2(0, 1) - 7.0) < 1e-12);
  CHECK(std::abs(h2(0, 2) - 7.0) < 1e-12);
  CHECK(std::abs(h2(0, 3)) == 0.0);

  auto t = setup(3, 0.3, kXiDark);
  const CMatrix h3 = CMatrix(build_full_hamiltonian(t.spec, t.drive));
  CHECK(h3(0b101, 0b101).real() == doctest::Approx(2 * t.delta - t.dnn / 3).epsilon(1e-12));
}

TEST_CASE("exchange forms agree") {
  for (double xi : {0.36, 1.1996, kXiDark}) {
    for (int n : {2, 5, 12, 20}) {
      const auto s = setup(n, 0.26, xi);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          if (i == k) continue;
          const double a = effective_j(s.spec, s.drive, i, k);
          const double b = effective_j_resonant_form(s.spec, s.drive, i, k);
          const double ref = j_main(s, i, k);
          CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1e-300));
          CHECK(std::abs(a - ref) <= 1e-9 * std::max(std::abs(ref), 1e-12 * s.j));
        }
    }
  }
}

TEST_CASE("exchange examples") {
  const auto s = setup(8, 0.26, kXiDark);
  CHECK(effective_j(s.spec, s.drive, 2, 3) == doctest::Approx(s.j).epsilon(1e-12));
  CHECK(effective_j(s.spec, s.drive, 2, 4) == doctest::Approx(-s.j).epsilon(1e-12));
  for (int i = 0; i + 2 < 8; ++i) {
    const double sum = effective_j(s.spec, s.drive, i, i + 1) + effective_j(s.spec, s.drive, i, i + 2);
    CHECK(std::abs(sum) < 1e-12 * s.j);
  }
  const auto far = setup(40, 0.26, kXiDark);
  CHECK(std::abs(effective_j(far.spec, far.drive, 0, 39)) < 1e-8 * far.j);

  DriveConfig pole = s.drive;
  pole.delta = pair_shift(s.spec, 0, 2);
  CHECK_THROWS_AS(effective_j(s.spec, pole, 0, 2), ModelValidityError);
}

TEST_CASE("light shift: general formula vs piecewise table") {
  for (double xi : {1.1, 1.1996, kXiDark}) {
    for (int n = 4; n <= 20; ++n) {
      const auto s = setup(n, 0.26, xi);
      for (int i = 0; i < n; ++i) {
        const double general = effective_light_shift(s.spec, s.drive, i, Truncation::next_nearest) / s.j;
        CHECK(std::abs(general - piecewise(n, xi, i)) < 1e-12 * std::max(1.0, std::abs(general)));
        CHECK(std::abs(light_shift_table(n, xi, 6, i) - piecewise(n, xi, i)) < 1e-12 * std::max(1.0, std::abs(general)));
      }
    }
  }
  const auto s4 = setup(4, 0.26, kXiDark);
  CHECK(effective_light_shift(s4.spec, s4.drive, 0, Truncation::next_nearest) == doctest::Approx(-s4.j).epsilon(1e-12));
  CHECK(std::abs(effective_light_shift(s4.spec, s4.drive, 1, Truncation::next_nearest)) < 1e-12 * s4.j);

  const auto p = setup(2, 0.4, 1.3);
  const double om2 = 1e6;
  const double d12 = oracle::shift(2, 0.4, 1.3, p.wd, 0, 1);
  CHECK(effective_light_shift(p.spec, p.drive, 0) == doctest::Approx(om2 / p.delta - om2 / (p.delta - d12)).epsilon(1e-12));
}

TEST_CASE("effective model") {
  const auto s = setup(4, 0.26, kXiDark);
  const EffectiveModel m = build_effective_model(s.spec, s.drive, Truncation::next_nearest);
  CHECK(m.h2_amp == doctest::Approx(2e6 / s.dnn).epsilon(1e-12));
  CHECK(m.j_scale() == doctest::Approx(s.j).epsilon(1e-12));
  CHECK(m.j.isApprox(m.j.transpose()));
  CHECK(m.j(0, 3) == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(m.j(i, i) == 0.0);

  const auto t = setup(10, 0.26, kXiDark);
  const EffectiveModel full = build_effective_model(t.spec, t.drive, Truncation::full);
  const EffectiveModel nn = build_effective_model(t.spec, t.drive, Truncation::next_nearest);
  CHECK((full.j - nn.j).cwiseAbs().maxCoeff() / t.j < 2e-2);
  for (int i = 0; i < 10; ++i)
    for (int k = 0; k < 10; ++k)
      if (std::abs(i - k) > 2) CHECK(nn.j(i, k) == 0.0);

  const auto weak = setup(4, 0.26, kXiDark, 1e-6);
  const EffectiveModel z = build_effective_model(weak.spec, weak.drive, Truncation::full);
  CHECK(z.j.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(z.delta_ls.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pair pump operator") {
  const auto s2 = setup(2, 0.3, 1.2);
  const EffectiveModel m2 = build_effective_model(s2.spec, s2.drive, Truncation::full);
  const CMatrix h2 = CMatrix(build_h2_operator(m2, BasisIndexer::full(2)));
  CHECK(std::abs(h2(3, 0) - 2e6 / s2.dnn) < 1e-9);
  CHECK(std::abs(h2(1, 0)) == 0.0);

  const auto s4 = setup(4, 0.26, kXiDark);
  const EffectiveModel m4 = build_effective_model(s4.spec, s4.drive, Truncation::full);
  const auto basis = BasisIndexer::pump_sector(4);
  const CMatrix h = CMatrix(build_h2_operator(m4, basis));
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  for (int b = 0; b < 3; ++b) CHECK(h(basis.index_of(3ULL << b), 0).real() == doctest::Approx(s4.j / 2).epsilon(1e-12));
  for (int i = 1; i <= 4; ++i) CHECK(h.row(i).cwiseAbs().maxCoeff() == 0.0);

  const CMatrix heff = CMatrix(build_effective_hamiltonian(m4, basis));
  CHECK((heff - heff.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(heff(1, 2).real() == doctest::Approx(m4.j(0, 1)).epsilon(1e-12));
  CHECK(heff(1, 1).real() == doctest::Approx(m4.delta_ls(0)).epsilon(1e-12));
}

TEST_CASE("rydberg spectrum") {
  const auto s = setup(5, 0.26, kXiDark);
  const RydbergSpectrum r = rydberg_spectrum(s.spec, s.drive);
  REQUIRE(r.v.size() == 6);
  CHECK(r.v[0] == 0.0);
  CHECK(r.v[1] == 0.0);
  CHECK(r.v[2] == doctest::Approx(s.dnn).epsilon(1e-12));
  CHECK(r.v[3] == doctest::Approx(s.dnn * (2 + 1.0 / 3)).epsilon(1e-12));
  for (std::size_t n = 1; n < r.v.size(); ++n) CHECK(r.v[n] >= r.v[n - 1]);
  CHECK(r.two_photon_detuning[0] == doctest::Approx(s.dnn / 2).epsilon(1e-12));
  CHECK(r.blockaded[0]);

  const auto p = setup(2, 0.26, kXiDark);
  const RydbergSpectrum r2 = rydberg_spectrum(p.spec, p.drive);
  CHECK(r2.anharmonicity.size() == 1);
  CHECK(r2.v[2] == doctest::Approx(p.dnn).epsilon(1e-12));
}
