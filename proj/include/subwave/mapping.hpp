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

#include "subwave/channel_model.hpp"
#include "subwave/circle_fit.hpp"

namespace subwave {

/// Channel ratio as a function of the dynamic phase theta = -2 pi d2 / lambda:
///   (H_{s,1} + A1~ e^{j theta}) / (H_{s,2} + A2 e^{j theta}).
template <typename Scalar>
std::complex<Scalar> ratio_at(const MultipathScene<Scalar>& scene, Scalar theta) {
  const std::complex<Scalar> z = std::polar(Scalar(1), theta);
  return (scene.static_1 + scene.effective_dyn_1() * z) / (scene.static_2 + scene.dyn_amp_2 * z);
}

/// |H_{s,2} + A2 e^{j theta}|^2.
template <typename Scalar>
Scalar denominator_power_at(const MultipathScene<Scalar>& scene, Scalar theta) {
  return std::norm(scene.static_2 + std::polar(scene.dyn_amp_2, theta));
}

namespace detail {

template <typename Scalar>
void require_static_dominant(const std::complex<Scalar>& static_2, Scalar dyn_amp_2, const char* who) {
  detail::require(dyn_amp_2 >= Scalar(0), std::string(who) + ": dynamic amplitude must be >= 0");
  if (!(std::abs(static_2) > dyn_amp_2))
    throw Error(ErrorKind::Domain, std::string(who) + ": requires |H_s2| > A2 (pole on or inside the unit circle)");
}

// |A1~ H_{s,2} - A2 H_{s,1}|, zero when the ratio is constant.
template <typename Scalar>
Scalar mobius_determinant(const MultipathScene<Scalar>& scene) {
  return std::abs(scene.effective_dyn_1() * scene.static_2 - scene.dyn_amp_2 * scene.static_1);
}

template <typename Scalar>
bool concentric(const MultipathScene<Scalar>& scene) {
  const Scalar scale = (std::abs(scene.static_1) + scene.dyn_amp_1) * (std::abs(scene.static_2) + scene.dyn_amp_2);
  return mobius_determinant(scene) <= Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale;
}

}  // namespace detail

/// Closed-form image of the unit circle under the ratio map: center
/// (H_{s,1} conj(H_{s,2}) - A1~ A2) / (|H_{s,2}|^2 - A2^2) and radius
/// |A1~ H_{s,2} - A2 H_{s,1}| / (|H_{s,2}|^2 - A2^2).
template <typename Scalar>
RatioCircle<Scalar> ratio_circle_of(const MultipathScene<Scalar>& scene) {
  detail::require_static_dominant(scene.static_2, scene.dyn_amp_2, "ratio_circle_of");
  const Scalar k = scene.mapping_constant();
  RatioCircle<Scalar> c;
  c.center = (scene.static_1 * std::conj(scene.static_2) - scene.effective_dyn_1() * scene.dyn_amp_2) / k;
  c.radius = detail::mobius_determinant(scene) / k;
  return c;
}

/// k = 2 pi / integral_0^{2 pi} dtheta / |H_{s,2} + A2 e^{j theta}|^2, by the
/// trapezoidal rule on n_grid periodic points.
template <typename Scalar>
Scalar integral_k_oracle(const std::complex<Scalar>& static_2, Scalar dyn_amp_2, Index n_grid) {
  detail::require(n_grid >= 1024, "integral_k_oracle: n_grid must be >= 1024");
  detail::require_static_dominant(static_2, dyn_amp_2, "integral_k_oracle");
  // Integrate |H_s2|^2 / |H2|^2 so a constant integrand sums exactly.
  const Scalar s2 = std::norm(static_2);
  Scalar sum = 0;
  for (Index j = 0; j < n_grid; ++j) {
    const Scalar theta = two_pi<Scalar> * Scalar(j) / Scalar(n_grid);
    sum += s2 / std::norm(static_2 + std::polar(dyn_amp_2, theta));
  }
  return s2 / (sum / Scalar(n_grid));
}

template <typename Scalar = double>
struct DifferentialMapping {
  Vector<Scalar> theta;
  Vector<Scalar> dphi_dtheta;  // finite-difference slope of the ratio angle
  Vector<Scalar> predicted;    // k / |H2(theta)|^2
  Scalar max_relative_deviation = 0;
};

/// Differentiates the exact ratio angle phi(theta) about the closed-form circle
/// center on a dense theta grid and compares it with k / |H2|^2.
template <typename Scalar>
DifferentialMapping<Scalar> differential_mapping_oracle(const MultipathScene<Scalar>& scene,
                                                        const Vector<Scalar>& theta_grid) {
  detail::require_static_dominant(scene.static_2, scene.dyn_amp_2, "differential_mapping_oracle");
  if (detail::concentric(scene))
    throw Error(ErrorKind::Degenerate, "differential_mapping_oracle: ratio is constant (concentric scene)", 0.0);
  const Index n = theta_grid.size();
  detail::require(n >= 3, "differential_mapping_oracle: need at least 3 grid points");
  Scalar max_step = 0;
  for (Index i = 1; i < n; ++i) {
    detail::require(theta_grid[i] > theta_grid[i - 1], "differential_mapping_oracle: grid must increase");
    max_step = std::max(max_step, theta_grid[i] - theta_grid[i - 1]);
  }
  detail::require(max_step <= two_pi<Scalar> / Scalar(1e4) * Scalar(1 + 1e-9),
                  "differential_mapping_oracle: grid needs >= 1e4 points per cycle");

  const RatioCircle<Scalar> circle = ratio_circle_of(scene);
  Vector<Scalar> raw(n);
  for (Index i = 0; i < n; ++i) raw[i] = std::arg(ratio_at(scene, theta_grid[i]) - circle.center);
  Vector<Scalar> phi(n);
  phi[0] = raw[0];
  for (Index i = 1; i < n; ++i) phi[i] = phi[i - 1] + detail::wrap_angle<Scalar>(raw[i] - raw[i - 1]);

  DifferentialMapping<Scalar> out{theta_grid, Vector<Scalar>(n), Vector<Scalar>(n), 0};
  const Scalar k = scene.mapping_constant();
  for (Index i = 0; i < n; ++i) {
    Scalar slope;
    if (i == 0) {
      const Scalar h1 = theta_grid[1] - theta_grid[0], h2 = theta_grid[2] - theta_grid[1];
      // Second-order one-sided difference on a possibly non-uniform grid.
      slope = -(2 * h1 + h2) / (h1 * (h1 + h2)) * phi[0] + (h1 + h2) / (h1 * h2) * phi[1] -
              h1 / (h2 * (h1 + h2)) * phi[2];
    } else if (i == n - 1) {
      const Scalar h1 = theta_grid[n - 2] - theta_grid[n - 3], h2 = theta_grid[n - 1] - theta_grid[n - 2];
      slope = h2 / (h1 * (h1 + h2)) * phi[n - 3] - (h1 + h2) / (h1 * h2) * phi[n - 2] +
              (2 * h2 + h1) / (h2 * (h1 + h2)) * phi[n - 1];
    } else {
      const Scalar hm = theta_grid[i] - theta_grid[i - 1], hp = theta_grid[i + 1] - theta_grid[i];
      slope = (-hp / (hm * (hm + hp))) * phi[i - 1] + ((hp - hm) / (hm * hp)) * phi[i] +
              (hm / (hp * (hm + hp))) * phi[i + 1];
    }
    out.dphi_dtheta[i] = slope;
    out.predicted[i] = k / denominator_power_at(scene, theta_grid[i]);
    out.max_relative_deviation =
        std::max(out.max_relative_deviation, std::abs(slope - out.predicted[i]) / std::abs(out.predicted[i]));
  }
  return out;
}

}  // namespace subwave
