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

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace subwave {

// ---------------------------------------------------------------------------
// Trajectories: path length d2(t) of the reflection seen by antenna 2.
// ---------------------------------------------------------------------------

enum class TrajectoryKind { ConstantSpeed, Piecewise, Sinusoidal };

struct TrajectoryParams {
  double start_m = 0.0;
  double speed_mps = 0.0;
  double duration_s = std::numeric_limits<double>::infinity();  // motion stops (holds) after this
  double amplitude_m = 0.0;                                     // sinusoidal
  double frequency_hz = 0.0;                                    // sinusoidal
  double phase_rad = 0.0;                                       // sinusoidal
  std::vector<std::pair<double, double>> knots;                 // piecewise: (t, d), t increasing
};

/// Deterministic callable trajectory built from a kind and its parameters.
class Trajectory {
 public:
  Trajectory(TrajectoryKind kind, TrajectoryParams params) : kind_(kind), p_(std::move(params)) {
    detail::require(!(p_.duration_s < 0.0), "trajectory: negative duration");
    detail::require(!std::isnan(p_.duration_s), "trajectory: duration is NaN");
    if (kind_ == TrajectoryKind::Piecewise) {
      detail::require(!p_.knots.empty(), "trajectory: piecewise kind needs at least one knot");
      for (std::size_t i = 1; i < p_.knots.size(); ++i)
        detail::require(p_.knots[i].first > p_.knots[i - 1].first, "trajectory: knot times must increase");
    }
  }

  TrajectoryKind kind() const noexcept { return kind_; }
  const TrajectoryParams& params() const noexcept { return p_; }

  double operator()(double t) const {
    const double tc = std::clamp(t, 0.0, p_.duration_s);
    switch (kind_) {
      case TrajectoryKind::ConstantSpeed:
        return p_.start_m + p_.speed_mps * tc;
      case TrajectoryKind::Sinusoidal:
        return p_.start_m + p_.amplitude_m * std::sin(two_pi<double> * p_.frequency_hz * tc + p_.phase_rad);
      case TrajectoryKind::Piecewise: {
        const auto& k = p_.knots;
        if (t <= k.front().first) return k.front().second;
        if (t >= k.back().first) return k.back().second;
        auto hi = std::upper_bound(k.begin(), k.end(), t,
                                   [](double v, const std::pair<double, double>& knot) { return v < knot.first; });
        auto lo = hi - 1;
        const double w = (t - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
      }
    }
    return 0.0;
  }

 private:
  TrajectoryKind kind_;
  TrajectoryParams p_;
};

inline Trajectory sample_trajectory(TrajectoryKind kind, TrajectoryParams params) {
  return Trajectory(kind, std::move(params));
}

// ---------------------------------------------------------------------------
// Scene and clock model
// ---------------------------------------------------------------------------

/// Two-antenna static/dynamic channel decomposition.
///
/// Antenna k sees H_{s,k} + A_k exp(-j 2 pi d_k(t) / lambda), with
/// d_1(t) = d_2(t) + path_delta_m.
template <typename Scalar = double>
struct MultipathScene {
  Scalar wavelength_m = Scalar(0.121);
  std::complex<Scalar> static_1{1, 0};
  std::complex<Scalar> static_2{1, 0};
  Scalar dyn_amp_1 = 0;
  Scalar dyn_amp_2 = 0;
  Scalar path_delta_m = 0;
  std::function<Scalar(Scalar)> trajectory = [](Scalar) { return Scalar(0); };

  void validate() const {
    detail::require(wavelength_m > Scalar(0), "scene: wavelength must be > 0");
    detail::require(dyn_amp_1 >= Scalar(0) && dyn_amp_2 >= Scalar(0), "scene: dynamic amplitudes must be >= 0");
    detail::require(static_cast<bool>(trajectory), "scene: trajectory not set");
  }

  /// The amplitude-based correction needs the static term of the denominator
  /// antenna to dominate its dynamic term.
  bool denominator_static_dominant() const { return std::abs(static_2) > dyn_amp_2; }

  /// A1 * exp(-j 2 pi (d1 - d2) / lambda): numerator dynamic coefficient seen
  /// relative to the antenna-2 phase.
  std::complex<Scalar> effective_dyn_1() const {
    return std::polar(dyn_amp_1, -two_pi<Scalar> * path_delta_m / wavelength_m);
  }

  /// (|H_{s,2}| + A_2)(|H_{s,2}| - A_2).
  Scalar mapping_constant() const {
    const Scalar s = std::abs(static_2);
    return (s + dyn_amp_2) * (s - dyn_amp_2);
  }
};

/// Phase offset common to all antennas of one receiver:
/// phi(t) = 2 pi cfo t + 2 pi sfo_ppm 1e-6 f_ref t + jitter, jitter ~ N(0, jitter_rad_std^2) i.i.d.
struct ClockOffsetModel {
  double cfo_hz = 0.0;
  double sfo_ppm = 0.0;
  double sfo_reference_hz = 312.5e3;
  double jitter_rad_std = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(jitter_rad_std >= 0.0, "clock model: jitter std must be >= 0");
    detail::require(std::isfinite(cfo_hz) && std::isfinite(sfo_ppm) && std::isfinite(sfo_reference_hz),
                    "clock model: non-finite parameter");
  }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

template <typename Scalar = double>
Vector<Scalar> uniform_timestamps(Scalar sample_rate_hz, Index count, Scalar t0 = Scalar(0)) {
  detail::require(sample_rate_hz > Scalar(0), "uniform_timestamps: sample rate must be > 0");
  detail::require(count >= 0, "uniform_timestamps: negative count");
  Vector<Scalar> t(count);
  for (Index i = 0; i < count; ++i) t[i] = t0 + Scalar(i) / sample_rate_hz;
  return t;
}

/// Ideal (offset-free) antenna-1 and antenna-2 traces.
template <typename Scalar>
std::pair<ChannelTrace<Scalar>, ChannelTrace<Scalar>> synthesize_ideal(const MultipathScene<Scalar>& scene,
                                                                       const Vector<Scalar>& timestamps) {
  scene.validate();
  detail::check_timestamps(timestamps, "synthesize_ideal");
  const Index n = timestamps.size();
  ComplexVector<Scalar> h1(n), h2(n);
  const Scalar k = two_pi<Scalar> / scene.wavelength_m;
  for (Index i = 0; i < n; ++i) {
    const Scalar d2 = scene.trajectory(timestamps[i]);
    if (!std::isfinite(d2))
      throw Error(ErrorKind::InvalidInput, "synthesize_ideal: non-finite trajectory value at t=" +
                                               std::to_string(static_cast<double>(timestamps[i])));
    const Scalar d1 = d2 + scene.path_delta_m;
    h1[i] = scene.static_1 + std::polar(scene.dyn_amp_1, -k * d1);
    h2[i] = scene.static_2 + std::polar(scene.dyn_amp_2, -k * d2);
  }
  return {ChannelTrace<Scalar>(timestamps, std::move(h1)), ChannelTrace<Scalar>(timestamps, std::move(h2))};
}

/// The per-sample offset phase phi_offset(t_i) of a clock model.
template <typename Scalar>
Vector<Scalar> offset_phase(const Vector<Scalar>& timestamps, const ClockOffsetModel& model) {
  model.validate();
  const Index n = timestamps.size();
  Vector<Scalar> phi(n);
  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const double drift_hz = model.cfo_hz + model.sfo_ppm * 1e-6 * model.sfo_reference_hz;
  for (Index i = 0; i < n; ++i) {
    double p = two_pi<double> * drift_hz * static_cast<double>(timestamps[i]);
    if (model.jitter_rad_std > 0.0) p += model.jitter_rad_std * jitter(rng);
    phi[i] = static_cast<Scalar>(p);
  }
  return phi;
}

/// Multiplies each sample by exp(-j phi_offset(t_i)). Magnitudes are unchanged.
template <typename Scalar>
ChannelTrace<Scalar> apply_clock_offsets(const ChannelTrace<Scalar>& trace, const ClockOffsetModel& model) {
  const Vector<Scalar> phi = offset_phase(trace.timestamps(), model);
  ComplexVector<Scalar> out = trace.samples();
  for (Index i = 0; i < out.size(); ++i) {
    if (phi[i] != Scalar(0)) out[i] *= std::polar(Scalar(1), -phi[i]);
  }
  return ChannelTrace<Scalar>(trace.timestamps(), std::move(out));
}

/// Additive circular complex Gaussian noise at the given SNR relative to the
/// mean sample power of the trace.
template <typename Scalar>
ChannelTrace<Scalar> add_complex_noise(const ChannelTrace<Scalar>& trace, double snr_db, std::uint64_t seed) {
  detail::require(std::isfinite(snr_db), "add_complex_noise: SNR must be finite");
  if (trace.size() == 0) return trace;
  const double power = static_cast<double>(trace.samples().cwiseAbs2().mean());
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0) / 2.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  ComplexVector<Scalar> out = trace.samples();
  for (Index i = 0; i < out.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    out[i] += std::complex<Scalar>(static_cast<Scalar>(re), static_cast<Scalar>(im));
  }
  return ChannelTrace<Scalar>(trace.timestamps(), std::move(out));
}

/// Scales a random subset of samples (Bernoulli(rate)) by `gain`, the
/// impulsive amplitude glitches a Hampel filter is meant to remove.
template <typename Scalar>
ChannelTrace<Scalar> add_amplitude_impulses(const ChannelTrace<Scalar>& trace, double rate, double gain,
                                            std::uint64_t seed) {
  detail::require(rate >= 0.0 && rate <= 1.0, "add_amplitude_impulses: rate must be in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution hit(rate);
  ComplexVector<Scalar> out = trace.samples();
  for (Index i = 0; i < out.size(); ++i) {
    if (hit(rng)) out[i] *= static_cast<Scalar>(gain);
  }
  return ChannelTrace<Scalar>(trace.timestamps(), std::move(out));
}

}  // namespace subwave
