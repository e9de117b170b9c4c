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

#include "subwave/envelope.hpp"

#include "subwave/channel_model.hpp"

#include <doctest.h>

#include <random>

using namespace subwave;
using cd = std::complex<double>;

namespace {

AmplitudeSeries<double> envelope_samples(double m, double r, double omega, double beta, double t1, double fs,
                                         double noise = 0, std::uint64_t seed = 0) {
  const auto n = static_cast<Index>(std::round(t1 * fs)) + 1;
  const Vector<double> t = uniform_timestamps(fs, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise > 0 ? noise : 1.0);
  Vector<double> a(n);
  for (Index i = 0; i < n; ++i) {
    cd h = m + std::polar(r, omega * t[i] + beta);
    if (noise > 0) h += cd(g(rng), g(rng));
    a[i] = std::abs(h);
  }
  return {t, a};
}

}  // namespace

TEST_CASE("full cycle recovers extrema and rate") {
  const auto fit = fit_envelope(envelope_samples(2, 1, two_pi<double>, 0, 1.0, 1000));
  REQUIRE(fit.status == EnvelopeStatus::Fitted);
  const auto& e = *fit.envelope;
  CHECK(e.max_amp == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(e.min_amp == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.omega_rad_s == doctest::Approx(two_pi<double>).epsilon(1e-6));
  CHECK(e.k() == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(e.fit_rmse < 1e-9);
  for (double t : {0.0, 0.3, 0.77}) CHECK(e.evaluate(t) == doctest::Approx(std::abs(2.0 + std::polar(1.0, two_pi<double> * t))));
}

TEST_CASE("half a cycle is enough to locate both extrema") {
  const auto fit = fit_envelope(envelope_samples(2, 1, std::numbers::pi, 0, 1.0, 1000));
  REQUIRE(fit.status == EnvelopeStatus::Fitted);
  CHECK(std::abs(fit.envelope->max_amp / 3.0 - 1) < 0.02);
  CHECK(std::abs(fit.envelope->min_amp / 1.0 - 1) < 0.02);
}

TEST_CASE("partial cycles at arbitrary phase, with and without an angular-rate hint") {
  for (double beta : {0.0, 1.0, 2.5, 4.0, 5.5}) {
    for (double cycles : {0.5, 0.75, 1.0, 2.5}) {
      const double omega = two_pi<double> * cycles / 2.0;
      const auto w = envelope_samples(1.0, 0.55, omega, beta, 2.0, 500);
      EnvelopeFitOptions hinted;
      hinted.omega_hint = omega * 1.1;
      for (const auto& opts : {EnvelopeFitOptions{}, hinted}) {
        const auto fit = fit_envelope(w, opts);
        REQUIRE(fit.status == EnvelopeStatus::Fitted);
        CHECK(fit.envelope->max_amp == doctest::Approx(1.55).epsilon(1e-6));
        CHECK(fit.envelope->min_amp == doctest::Approx(0.45).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("constant amplitude is a static window") {
  const AmplitudeSeries<double> w(uniform_timestamps(1000.0, 500), Vector<double>::Constant(500, 1.3));
  const auto fit = fit_envelope(w);
  CHECK(fit.status == EnvelopeStatus::Static);
  CHECK_FALSE(fit.envelope);
  // 1% ripple is still below the 2% swing floor.
  const auto ripple = envelope_samples(1.0, 0.005, 20.0, 0, 0.5, 1000);
  CHECK(fit_envelope(ripple).status == EnvelopeStatus::Static);
}

TEST_CASE("windows that are too short are rejected") {
  CHECK_THROWS_AS(fit_envelope(envelope_samples(2, 1, 10, 0, 0.05, 1000)), Error);
  const AmplitudeSeries<double> three(uniform_timestamps(10.0, 3), Vector<double>::Ones(3));
  CHECK_THROWS_AS(fit_envelope(three), Error);
}

TEST_CASE("an iteration cap that is too tight reports the residual") {
  EnvelopeFitOptions opts;
  opts.max_iterations = 1;
  opts.cycle_ladder = false;
  try {
    fit_envelope(envelope_samples(2, 1, 7.0, 1.0, 1.0, 1000, 0.02, 3), opts);
    FAIL("expected fit failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FitFailed);
    REQUIRE(e.metric());
    CHECK(*e.metric() > 0);
  }
}

TEST_CASE("noise at 30 dB keeps half-cycle extrema within 5%") {
  // |H|^2 averages m^2 + r^2 = 1.3025; 30 dB noise per component sigma = sqrt(1.3025e-3 / 2).
  const double sigma = std::sqrt(1.3025e-3 / 2);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto fit = fit_envelope(envelope_samples(1.0, 0.55, std::numbers::pi, 0.8, 1.0, 1000, sigma, seed));
    REQUIRE(fit.status == EnvelopeStatus::Fitted);
    CHECK(std::abs(fit.envelope->max_amp / 1.55 - 1) < 0.05);
    CHECK(std::abs(fit.envelope->min_amp / 0.45 - 1) < 0.05);
  }
}
