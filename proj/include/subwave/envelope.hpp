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

#pragma once

#include "subwave/channel_trace.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <vector>

namespace subwave {

/// Denominator amplitude envelope over one window, under the model
///   |H2(t)| = | m + r exp(j (omega (t - window_start) + beta)) |,
///   m = (max + min) / 2,  r = (max - min) / 2.
template <typename Scalar = double>
struct AmplitudeEnvelope {
  Scalar max_amp = 0;
  Scalar min_amp = 0;
  Scalar omega_rad_s = 0;
  Scalar beta_rad = 0;
  Scalar window_start = 0;
  Scalar window_end = 0;
  Scalar fit_rmse = 0;

  /// The mapping constant |H2|max |H2|min.
  Scalar k() const { return max_amp * min_amp; }

  Scalar evaluate(Scalar t) const {
    const Scalar m = (max_amp + min_amp) / 2;
    const Scalar r = (max_amp - min_amp) / 2;
    return std::abs(m + std::polar(r, omega_rad_s * (t - window_start) + beta_rad));
  }
};

enum class EnvelopeStatus { Fitted, Static };

template <typename Scalar = double>
struct EnvelopeFit {
  EnvelopeStatus status = EnvelopeStatus::Static;
  std::optional<AmplitudeEnvelope<Scalar>> envelope;  // set iff Fitted
  int iterations = 0;                                 // LM iterations of the winning start
};

struct EnvelopeFitOptions {
  double min_span_s = 0.1;
  double static_swing_fraction = 0.02;  // (max - min) / mean below this -> static window
  int max_iterations = 100;
  double relative_tolerance = 1e-10;
  int phase_grid = 16;
  // Additional angular-rate starting point, e.g. from the ratio rotation rate.
  std::optional<double> omega_hint;
  // Also start from a ladder of cycle counts per window (partial to several cycles).
  bool cycle_ladder = true;
};

namespace detail {

template <typename Scalar>
struct EnvelopeProblem {
  Vector<Scalar> tau;  // time relative to the window center
  Vector<Scalar> amp;

  // p = (u, v, omega, beta_c): min = u^2, max = u^2 + v^2.
  static Scalar center_of(const Eigen::Matrix<Scalar, 4, 1>& p) { return p(0) * p(0) + p(1) * p(1) / 2; }
  static Scalar radius_of(const Eigen::Matrix<Scalar, 4, 1>& p) { return p(1) * p(1) / 2; }

  Scalar cost(const Eigen::Matrix<Scalar, 4, 1>& p) const {
    const Scalar m = center_of(p), r = radius_of(p);
    const Scalar a = m * m + r * r, b = 2 * m * r;
    Scalar s = 0;
    for (Index i = 0; i < tau.size(); ++i) {
      const Scalar g = std::sqrt(std::max(a + b * std::cos(p(2) * tau[i] + p(3)), Scalar(0)));
      const Scalar f = g - amp[i];
      s += f * f;
    }
    return s / 2;
  }

  void linearize(const Eigen::Matrix<Scalar, 4, 1>& p, Eigen::Matrix<Scalar, 4, 4>& jtj,
                 Eigen::Matrix<Scalar, 4, 1>& jtf) const {
    const Scalar m = center_of(p), r = radius_of(p);
    const Scalar a = m * m + r * r, b = 2 * m * r;
    constexpr Scalar tiny = std::numeric_limits<Scalar>::min() * Scalar(1e10);
    jtj.setZero();
    jtf.setZero();
    Eigen::Matrix<Scalar, 4, 1> row;
    for (Index i = 0; i < tau.size(); ++i) {
      const Scalar psi = p(2) * tau[i] + p(3);
      const Scalar c = std::cos(psi), s = std::sin(psi);
      const Scalar g = std::max(std::sqrt(std::max(a + b * c, Scalar(0))), tiny);
      const Scalar dm = (m + r * c) / g;
      const Scalar dr = (r + m * c) / g;
      const Scalar dpsi = -m * r * s / g;
      row << dm * 2 * p(0), (dm + dr) * p(1), dpsi * tau[i], dpsi;
      jtj.template selfadjointView<Eigen::Lower>().rankUpdate(row);
      jtf += row * (g - amp[i]);
    }
    jtj.template triangularView<Eigen::StrictlyUpper>() = jtj.transpose();
  }
};

template <typename Scalar>
struct LmResult {
  Eigen::Matrix<Scalar, 4, 1> p;
  Scalar cost;
  int iterations;
  bool converged;
};

// Levenberg-Marquardt with Marquardt diagonal scaling and Nielsen's damping update.
template <typename Scalar>
LmResult<Scalar> levenberg_marquardt(const EnvelopeProblem<Scalar>& problem, Eigen::Matrix<Scalar, 4, 1> p,
                                     const EnvelopeFitOptions& options) {
  using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
  using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();

  Scalar cost = problem.cost(p);
  Mat4 jtj;
  Vec4 jtf;
  problem.linearize(p, jtj, jtf);
  Scalar mu = Scalar(1e-3);
  Scalar nu = 2;
  const Scalar cost_floor = eps * eps * Scalar(problem.amp.size()) * problem.amp.squaredNorm();

  for (int it = 1; it <= options.max_iterations; ++it) {
    if (cost <= cost_floor || jtf.template lpNorm<Eigen::Infinity>() <= eps * eps) return {p, cost, it - 1, true};

    Vec4 scale = jtj.diagonal().cwiseMax(eps * (Scalar(1) + jtj.diagonal().maxCoeff()));
    Mat4 damped = jtj;
    damped.diagonal() += mu * scale;
    const Vec4 step = damped.ldlt().solve(-jtf);
    if (!step.allFinite()) return {p, cost, it, false};

    if (step.norm() <= eps * (p.norm() + eps)) return {p, cost, it, true};

    const Vec4 trial = p + step;
    const Scalar trial_cost = problem.cost(trial);
    const Scalar predicted = Scalar(0.5) * step.dot(mu * scale.cwiseProduct(step) - jtf);
    const Scalar rho = predicted > 0 ? (cost - trial_cost) / predicted : Scalar(-1);

    if (rho > 0 && std::isfinite(trial_cost)) {
      const Scalar rel = (cost - trial_cost) / std::max(cost, std::numeric_limits<Scalar>::min());
      p = trial;
      cost = trial_cost;
      problem.linearize(p, jtj, jtf);
      const Scalar t = 2 * rho - 1;
      mu *= std::max(Scalar(1) / 3, Scalar(1) - t * t * t);
      nu = 2;
      if (rel < static_cast<Scalar>(options.relative_tolerance)) return {p, cost, it, true};
    } else {
      mu *= nu;
      nu *= 2;
      if (!std::isfinite(mu) || mu > Scalar(1e300)) return {p, cost, it, true};
    }
  }
  return {p, cost, options.max_iterations, false};
}

// Dominant nonzero frequency (rad/s) of the mean-removed window, from a
// zero-padded FFT with parabolic peak interpolation.
template <typename Scalar>
std::optional<Scalar> dominant_angular_frequency(const Vector<Scalar>& amp, Scalar dt) {
  const Index n = amp.size();
  if (n < 4 || !(dt > 0)) return std::nullopt;
  std::size_t nfft = 1;
  while (nfft < static_cast<std::size_t>(4 * n)) nfft <<= 1;
  std::vector<Scalar> buf(nfft, Scalar(0));
  const Scalar mean = amp.mean();
  for (Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = amp[i] - mean;
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> spec;
  fft.fwd(spec, buf);
  std::size_t best = 0;
  Scalar best_pow = 0;
  for (std::size_t j = 1; j < nfft / 2; ++j) {
    const Scalar pw = std::norm(spec[j]);
    if (pw > best_pow) {
      best_pow = pw;
      best = j;
    }
  }
  if (best == 0) return std::nullopt;
  Scalar offset = 0;
  if (best + 1 < nfft / 2) {
    const Scalar l = std::abs(spec[best - 1]), c = std::abs(spec[best]), r = std::abs(spec[best + 1]);
    const Scalar den = l - 2 * c + r;
    if (den != Scalar(0)) offset = std::clamp(Scalar(0.5) * (l - r) / den, Scalar(-0.5), Scalar(0.5));
  }
  return two_pi<Scalar> * (static_cast<Scalar>(best) + offset) / (static_cast<Scalar>(nfft) * dt);
}

}  // namespace detail

/// Non-linear least-squares fit of the amplitude envelope model to one window.
///
/// Returns EnvelopeStatus::Static without fitting when the amplitude swing is
/// below `static_swing_fraction` of the mean. Throws ErrorKind::FitFailed
/// (metric = RMS residual) when the best start does not converge, and
/// ErrorKind::InvalidInput when the window spans less than `min_span_s`.
template <typename Scalar>
EnvelopeFit<Scalar> fit_envelope(const AmplitudeSeries<Scalar>& window, const EnvelopeFitOptions& options = {}) {
  using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
  const Index n = window.size();
  detail::require(n >= 4, "fit_envelope: need at least 4 samples");
  const Vector<Scalar>& t = window.timestamps();
  const Vector<Scalar>& amp = window.magnitude();
  const Scalar t0 = t[0], t1 = t[n - 1];
  const Scalar span = t1 - t0;
  detail::require(span >= static_cast<Scalar>(options.min_span_s) * Scalar(1 - 1e-9),
                  "fit_envelope: window shorter than the minimum span");

  const Scalar amax = amp.maxCoeff(), amin = amp.minCoeff(), amean = amp.mean();
  if (!(amax - amin >= static_cast<Scalar>(options.static_swing_fraction) * amean)) return {};

  const Scalar tc = (t0 + t1) / 2;
  detail::EnvelopeProblem<Scalar> problem{(t.array() - tc).matrix(), amp};

  std::vector<Scalar> omegas;
  if (options.omega_hint && *options.omega_hint > 0) {
    const Scalar h = static_cast<Scalar>(*options.omega_hint);
    for (Scalar f : {Scalar(1), Scalar(0.7), Scalar(1.4)}) omegas.push_back(h * f);
  }
  if (auto w = detail::dominant_angular_frequency<Scalar>(amp, span / Scalar(n - 1))) omegas.push_back(*w);
  if (options.cycle_ladder) {
    for (Scalar cycles : {0.15, 0.25, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0, 3.0, 5.0})
      omegas.push_back(two_pi<Scalar> * cycles / span);
  }
  detail::require(!omegas.empty(), "fit_envelope: no starting angular rate");

  const Scalar u0 = std::sqrt(std::max(amin, amax * Scalar(1e-3)));
  const Scalar v0 = std::sqrt(std::max(amax - amin, amean * Scalar(1e-3)));
  const Scalar good_enough = std::numeric_limits<Scalar>::epsilon() * amp.squaredNorm() * Scalar(1e4);

  std::optional<detail::LmResult<Scalar>> best;
  for (Scalar omega : omegas) {
    Vec4 start(u0, v0, omega, 0);
    Scalar start_cost = std::numeric_limits<Scalar>::infinity();
    for (int q = 0; q < options.phase_grid; ++q) {
      Vec4 p(u0, v0, omega, two_pi<Scalar> * Scalar(q) / Scalar(options.phase_grid));
      const Scalar c = problem.cost(p);
      if (c < start_cost) {
        start_cost = c;
        start = p;
      }
    }
    auto result = detail::levenberg_marquardt(problem, start, options);
    if (!best || result.cost < best->cost) best = result;
    if (best->converged && best->cost <= good_enough) break;
  }

  const Scalar rmse = std::sqrt(2 * best->cost / Scalar(n));
  if (!best->converged || !best->p.allFinite())
    throw Error(ErrorKind::FitFailed, "fit_envelope: optimizer did not converge", static_cast<double>(rmse));

  Vec4 p = best->p;
  if (p(2) < 0) {
    p(2) = -p(2);
    p(3) = -p(3);
  }
  AmplitudeEnvelope<Scalar> env;
  env.min_amp = p(0) * p(0);
  env.max_amp = env.min_amp + p(1) * p(1);
  env.omega_rad_s = p(2);
  Scalar beta = std::fmod(p(3) - p(2) * (tc - t0), two_pi<Scalar>);
  if (beta < 0) beta += two_pi<Scalar>;
  env.beta_rad = beta;
  env.window_start = t0;
  env.window_end = t1;
  env.fit_rmse = rmse;
  return {EnvelopeStatus::Fitted, env, best->iterations};
}

}  // namespace subwave
