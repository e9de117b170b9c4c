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

#include "subwave/envelope.hpp"
#include "subwave/rotation.hpp"

#include <span>
#include <type_traits>
#include <string_view>

namespace subwave {

enum class Method { Baseline, Corrected };

inline std::string_view to_string(Method m) { return m == Method::Baseline ? "baseline" : "corrected"; }

/// Cumulative path-length change, anchored at zero on the first sample.
template <typename Scalar = double>
struct DisplacementSeries {
  Vector<Scalar> timestamps;
  Vector<Scalar> delta_d_m;
  Method method_tag = Method::Baseline;

  Index size() const noexcept { return timestamps.size(); }
};

struct CorrectionOptions {
  double k_floor = 1e-12;  // smallest admissible |H2|max |H2|min
};

namespace detail {

template <typename Scalar>
void check_envelope(const AmplitudeEnvelope<Scalar>& e, const CorrectionOptions& options) {
  if (!(e.min_amp > Scalar(0)) || !(e.k() >= static_cast<Scalar>(options.k_floor)) || !(e.max_amp >= e.min_amp))
    throw Error(ErrorKind::CorrectionUndefined,
                "correct_increments: envelope with min_amp <= 0 or max*min below floor "
                "(dynamic term dominates the denominator antenna)",
                static_cast<double>(e.k()));
}

}  // namespace detail

/// Maps ratio rotation increments onto ideal-channel increments:
///   dtheta_i = |H2|_mid^2 / (|H2|max |H2|min) * dphi_i,
/// with |H2|_mid the mean of the magnitudes at the increment's endpoints.
/// assignment[i] selects the envelope for increment i; a negative entry means
/// no envelope is available and raises CorrectionUndefined.
template <typename Scalar>
AngleSeries<Scalar> correct_increments(const AngleSeries<Scalar>& angles, const AmplitudeSeries<Scalar>& amps,
                                       std::span<const AmplitudeEnvelope<std::type_identity_t<Scalar>>> envelopes,
                                       std::span<const Index> assignment, const CorrectionOptions& options = {}) {
  const Index n = angles.size();
  detail::require(amps.size() == n, "correct_increments: angle and amplitude series differ in length");
  detail::require(static_cast<Index>(assignment.size()) == angles.increments_rad.size(),
                  "correct_increments: assignment must cover every increment");
  for (Index i = 0; i < n; ++i) {
    if (amps.timestamps()[i] != angles.timestamps[i])
      throw Error(ErrorKind::InvalidInput, "correct_increments: series are not time-aligned");
  }
  for (const auto& e : envelopes) detail::check_envelope(e, options);

  const Vector<Scalar>& a = amps.magnitude();
  Vector<Scalar> corrected(angles.increments_rad.size());
  for (Index i = 0; i < corrected.size(); ++i) {
    const Index w = assignment[static_cast<std::size_t>(i)];
    if (w < 0 || w >= static_cast<Index>(envelopes.size()))
      throw Error(ErrorKind::CorrectionUndefined,
                  "correct_increments: no amplitude envelope covers increment " + std::to_string(i));
    const Scalar mid = (a[i] + a[i + 1]) / 2;
    corrected[i] = mid * mid / envelopes[static_cast<std::size_t>(w)].k() * angles.increments_rad[i];
  }
  return AngleSeries<Scalar>::from_increments(angles.timestamps, corrected,
                                              n > 0 ? angles.unwrapped_rad[0] : Scalar(0));
}

/// Same, assigning each increment to the envelope whose window center is
/// nearest the increment midpoint.
template <typename Scalar>
AngleSeries<Scalar> correct_increments(const AngleSeries<Scalar>& angles, const AmplitudeSeries<Scalar>& amps,
                                       std::span<const AmplitudeEnvelope<std::type_identity_t<Scalar>>> envelopes,
                                       const CorrectionOptions& options = {}) {
  const Index m = angles.increments_rad.size();
  std::vector<Index> assignment(static_cast<std::size_t>(m), -1);
  for (Index i = 0; i < m; ++i) {
    const Scalar mid = (angles.timestamps[i] + angles.timestamps[i + 1]) / 2;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t w = 0; w < envelopes.size(); ++w) {
      const Scalar d = std::abs((envelopes[w].window_start + envelopes[w].window_end) / 2 - mid);
      if (d < best) {
        best = d;
        assignment[static_cast<std::size_t>(i)] = static_cast<Index>(w);
      }
    }
  }
  return correct_increments(angles, amps, envelopes, std::span<const Index>(assignment), options);
}

/// delta_d(t_i) = -lambda (unwrapped(t_i) - unwrapped(t_0)) / (2 pi).
template <typename Scalar>
DisplacementSeries<Scalar> accumulate_displacement(const AngleSeries<Scalar>& angles, Scalar wavelength_m,
                                                   Method tag = Method::Corrected) {
  detail::require(wavelength_m > Scalar(0), "accumulate_displacement: wavelength must be > 0");
  DisplacementSeries<Scalar> out{angles.timestamps, Vector<Scalar>(angles.size()), tag};
  if (angles.size() == 0) return out;
  const Scalar origin = angles.unwrapped_rad[0];
  for (Index i = 0; i < angles.size(); ++i)
    out.delta_d_m[i] = -wavelength_m * (angles.unwrapped_rad[i] - origin) / two_pi<Scalar> + Scalar(0);
  out.delta_d_m[0] = 0;
  return out;
}

}  // namespace subwave
