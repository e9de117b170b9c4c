// SPDX-License-Identifier: Apache-2.0
//
// subwave: sub-wavelength displacement recovery from cross-antenna channel ratios
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "subwave/circle_fit.hpp"

#include "subwave/mapping.hpp"
#include "subwave/ratio.hpp"

#include <doctest.h>

#include <random>

using namespace subwave;
using cd = std::complex<double>;

TEST_CASE("three points on the unit circle") {
  ComplexVector<double> z(3);
  z << cd(1, 0), cd(0, 1), cd(-1, 0);
  const auto c = fit_circle(z);
  CHECK(std::abs(c.center) < 1e-14);
  CHECK(c.radius == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.rms_residual < 1e-14);
}

TEST_CASE("axis-symmetric four points") {
  ComplexVector<double> z(4);
  z << cd(5, 1), cd(5, -1), cd(6, 0), cd(4, 0);
  const auto c = fit_circle(z);
  CHECK(std::abs(c.center - cd(5, 0)) < 1e-13);
  CHECK(c.radius == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("works on expressions and sub-blocks") {
  ComplexVector<double> z(8);
  for (Index i = 0; i < 8; ++i) z[i] = cd(2, -1) + std::polar(0.5, 0.7 * static_cast<double>(i));
  const auto c = fit_circle(z.segment(2, 5) * cd(2, 0));
  CHECK(std::abs(c.center - cd(4, -2)) < 1e-12);
  CHECK(c.radius == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("too few samples and collinear samples") {
  ComplexVector<double> two(2);
  two << cd(0, 0), cd(1, 1);
  try {
    fit_circle(two);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }

  ComplexVector<double> line(10);
  for (Index i = 0; i < 10; ++i) line[i] = cd(1, 2) * static_cast<double>(i);
  try {
    fit_circle(line);
    FAIL("expected degenerate fit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
    REQUIRE(e.metric());
    CHECK(*e.metric() < 1e-8);
  }

  ComplexVector<double> same = ComplexVector<double>::Constant(5, cd(3, 3));
  CHECK_THROWS_AS(fit_circle(same), Error);

  // Points on a very shallow arc are flagged as nearly collinear.
  ComplexVector<double> shallow(50);
  for (Index i = 0; i < 50; ++i) shallow[i] = std::polar(1e9, 1e-12 * static_cast<double>(i));
  CHECK_THROWS_AS(fit_circle(shallow), Error);
}

TEST_CASE("noise-free ratio traces are circles") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    MultipathScene<double> s;
    s.wavelength_m = 0.121;
    s.static_1 = cd(u(rng), u(rng));
    s.static_2 = std::polar(0.5 + std::abs(u(rng)), 3 * u(rng));
    s.dyn_amp_1 = 0.1 + std::abs(u(rng));
    s.dyn_amp_2 = std::abs(s.static_2) * (0.05 + 0.85 * std::abs(u(rng)));
    s.path_delta_m = 0.05 * u(rng);
    if (detail::concentric(s)) continue;
    s.trajectory = [](double t) { return 0.05 * t; };
    const auto [h1, h2] = synthesize_ideal(s, uniform_timestamps(1000.0, 2421));  // just over one wavelength
    const auto c = fit_circle(compute_ratio(h1, h2).samples);
    const auto exact = ratio_circle_of(s);
    CHECK(c.rms_residual < 1e-9 * c.radius);
    CHECK(std::abs(c.center - exact.center) < 1e-9 * exact.radius + 1e-12);
    CHECK(c.radius == doctest::Approx(exact.radius).epsilon(1e-9));
  }
}
