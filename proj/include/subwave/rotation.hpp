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

#include "subwave/circle_fit.hpp"
#include "subwave/ratio.hpp"

#include <span>
#include <type_traits>
#include <vector>

namespace subwave {

/// Unwrapped rotation angle and its per-step increments.
/// increments[i] == unwrapped[i + 1] - unwrapped[i] exactly.
template <typename Scalar = double>
struct AngleSeries {
  Vector<Scalar> timestamps;
  Vector<Scalar> unwrapped_rad;
  Vector<Scalar> increments_rad;
  std::vector<Index> ambiguous;  // samples too close to the circle center to carry an angle

  Index size() const noexcept { return timestamps.size(); }

  static AngleSeries from_unwrapped(Vector<Scalar> t, Vector<Scalar> unwrapped) {
    detail::require(t.size() == unwrapped.size(), "AngleSeries: length mismatch");
    AngleSeries s;
    s.timestamps = std::move(t);
    s.unwrapped_rad = std::move(unwrapped);
    const Index n = s.unwrapped_rad.size();
    s.increments_rad = n > 1 ? Vector<Scalar>(s.unwrapped_rad.tail(n - 1) - s.unwrapped_rad.head(n - 1))
                             : Vector<Scalar>(0);
    return s;
  }

  /// Accumulates increments starting from `start`.
  static AngleSeries from_increments(Vector<Scalar> t, const Vector<Scalar>& increments, Scalar start = 0) {
    detail::require(t.size() == increments.size() + 1 || (t.size() == 0 && increments.size() == 0),
                    "AngleSeries: increments must be one shorter than timestamps");
    Vector<Scalar> u(t.size());
    if (t.size() > 0) u[0] = start;
    for (Index i = 0; i < increments.size(); ++i) u[i + 1] = u[i] + increments[i];
    return from_unwrapped(std::move(t), std::move(u));
  }
};

/// Adds +-2 pi whenever a raw step exceeds pi in magnitude.
template <typename Derived>
Vector<typename Derived::Scalar> unwrap_angles(const Eigen::MatrixBase<Derived>& raw) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out(raw.size());
  if (raw.size() == 0) return out;
  out[0] = raw[0];
  for (Index i = 1; i < raw.size(); ++i) out[i] = out[i - 1] + detail::wrap_angle<Scalar>(raw[i] - raw[i - 1]);
  return out;
}

struct RotationOptions {
  // |ratio - center| below this fraction of the radius leaves the angle undefined.
  double near_center_fraction = 0.05;
  double max_ambiguous_fraction = 0.01;
};

namespace detail {

template <typename Scalar>
void check_ambiguous(const AngleSeries<Scalar>& s, const RotationOptions& options) {
  const double n = static_cast<double>(s.size());
  if (s.size() == 0) return;
  const double fraction = static_cast<double>(s.ambiguous.size()) / n;
  if (fraction > options.max_ambiguous_fraction || s.ambiguous.size() == static_cast<std::size_t>(s.size()))
    throw Error(ErrorKind::Degenerate,
                "extract_rotation: " + std::to_string(s.ambiguous.size()) +
                    " samples lie too close to the circle center for a defined angle",
                fraction);
}

}  // namespace detail

template <typename Scalar>
AngleSeries<Scalar> extract_rotation_windowed(const RatioTrace<Scalar>& ratio,
                                              std::span<const RatioCircle<std::type_identity_t<Scalar>>> circles,
                                              std::span<const Index> assignment, const RotationOptions& options = {});

/// Angle of the ratio about one fitted circle center, unwrapped. Near-center
/// samples hold the previous angle and are listed in `ambiguous`.
template <typename Scalar>
AngleSeries<Scalar> extract_rotation(const RatioTrace<Scalar>& ratio, const RatioCircle<Scalar>& circle,
                                     const RotationOptions& options = {}) {
  detail::require(circle.radius > Scalar(0), "extract_rotation: circle radius must be > 0");
  const std::vector<Index> all(static_cast<std::size_t>(std::max<Index>(ratio.size() - 1, 0)), 0);
  return extract_rotation_windowed(ratio, std::span<const RatioCircle<Scalar>>(&circle, 1),
                                   std::span<const Index>(all), options);
}

/// Like extract_rotation, but increment i (between samples i and i + 1) is
/// measured about circles[assignment[i]], so the center may drift over time
/// without introducing jumps at window boundaries.
template <typename Scalar>
AngleSeries<Scalar> extract_rotation_windowed(const RatioTrace<Scalar>& ratio,
                                              std::span<const RatioCircle<std::type_identity_t<Scalar>>> circles,
                                              std::span<const Index> assignment,
                                              const RotationOptions& options) {
  const Index n = ratio.size();
  detail::require(!circles.empty(), "extract_rotation: no circles");
  detail::require(static_cast<Index>(assignment.size()) == std::max<Index>(n - 1, 0),
                  "extract_rotation: assignment must cover every increment");
  for (const auto& c : circles) detail::require(c.radius > Scalar(0), "extract_rotation: circle radius must be > 0");

  AngleSeries<Scalar> out;
  Vector<Scalar> unwrapped(n);
  if (n == 0) {
    out = AngleSeries<Scalar>::from_unwrapped(ratio.timestamps, unwrapped);
    return out;
  }

  const auto near_center = [&](Index i, const RatioCircle<Scalar>& c) {
    return std::abs(ratio.samples[i] - c.center) < static_cast<Scalar>(options.near_center_fraction) * c.radius;
  };

  std::vector<Index> ambiguous;
  // Leading samples without a defined angle take the first defined one.
  Index last_good = -1;
  const auto& c0 = circles[static_cast<std::size_t>(n > 1 ? assignment[0] : 0)];
  for (Index i = 0; i < n; ++i) {
    const auto& c = i == 0 ? c0 : circles[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i - 1)])];
    if (!near_center(i, c)) {
      last_good = i;
      break;
    }
    ambiguous.push_back(i);
  }
  if (last_good < 0) {
    out = AngleSeries<Scalar>::from_unwrapped(ratio.timestamps, Vector<Scalar>::Zero(n));
    out.ambiguous = std::move(ambiguous);
    detail::check_ambiguous(out, options);
    return out;
  }

  {
    const auto& c = last_good == 0 ? c0 : circles[static_cast<std::size_t>(assignment[static_cast<std::size_t>(last_good - 1)])];
    const Scalar a = std::arg(ratio.samples[last_good] - c.center);
    for (Index i = 0; i <= last_good; ++i) unwrapped[i] = a;
  }

  for (Index i = last_good + 1; i < n; ++i) {
    const auto& c = circles[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i - 1)])];
    if (near_center(i, c) || near_center(last_good, c)) {
      ambiguous.push_back(i);
      unwrapped[i] = unwrapped[i - 1];
      continue;
    }
    const Scalar step = std::arg((ratio.samples[i] - c.center) / (ratio.samples[last_good] - c.center));
    unwrapped[i] = unwrapped[last_good] + step;
    // Samples skipped as ambiguous carry the previous value; the step above is
    // measured from the last defined sample so nothing is lost.
    last_good = i;
  }

  out = AngleSeries<Scalar>::from_unwrapped(ratio.timestamps, std::move(unwrapped));
  out.ambiguous = std::move(ambiguous);
  detail::check_ambiguous(out, options);
  return out;
}

}  // namespace subwave
