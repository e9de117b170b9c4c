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
#include <vector>

namespace subwave {

template <typename Scalar = double>
struct HampelResult {
  Vector<Scalar> values;
  std::vector<Index> replaced;
};

/// Hampel identifier: a sample is replaced by the median of its window when it
/// deviates from that median by more than n_mad * 1.4826 * MAD. Windows are
/// [i - half_window, i + half_window], truncated at the edges.
template <typename Derived>
HampelResult<typename Derived::Scalar> hampel(const Eigen::MatrixBase<Derived>& x, Index half_window, double n_mad) {
  using Scalar = typename Derived::Scalar;
  detail::require(half_window >= 1, "hampel: half_window must be >= 1");
  detail::require(n_mad > 0.0, "hampel: n_mad must be > 0");

  constexpr Scalar mad_scale = Scalar(1.4826);
  const Vector<Scalar> xv = x;
  const Index n = xv.size();
  HampelResult<Scalar> out{xv, {}};
  std::vector<Scalar> buf;
  buf.reserve(static_cast<std::size_t>(2 * half_window + 1));

  const auto median = [](std::vector<Scalar>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const Scalar upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const Scalar lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / Scalar(2);
  };

  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - half_window);
    const Index hi = std::min<Index>(n - 1, i + half_window);
    buf.assign(xv.data() + lo, xv.data() + hi + 1);
    const Scalar med = median(buf);
    for (auto& v : buf) v = std::abs(v - med);
    const Scalar mad = median(buf);
    if (std::abs(xv[i] - med) > static_cast<Scalar>(n_mad) * mad_scale * mad) {
      out.values[i] = med;
      out.replaced.push_back(i);
    }
  }
  return out;
}

template <typename Scalar>
AmplitudeSeries<Scalar> hampel_filter(const AmplitudeSeries<Scalar>& amps, Index half_window, double n_mad) {
  return AmplitudeSeries<Scalar>(amps.timestamps(), hampel(amps.magnitude(), half_window, n_mad).values);
}

/// Centered moving average over 2 * half_window + 1 samples with truncated
/// windows at the edges. half_window == 0 returns the input.
template <typename Derived>
Vector<typename Derived::Scalar> moving_average(const Eigen::MatrixBase<Derived>& x, Index half_window) {
  using Scalar = typename Derived::Scalar;
  detail::require(half_window >= 0, "moving_average: half_window must be >= 0");
  const Index n = x.size();
  Vector<Scalar> out(n);
  if (half_window == 0 || n == 0) {
    out = x;
    return out;
  }
  // Prefix sums keep this O(n); magnitudes are O(1) so cancellation is benign.
  Vector<Scalar> prefix(n + 1);
  prefix[0] = 0;
  for (Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - half_window);
    const Index hi = std::min<Index>(n - 1, i + half_window);
    out[i] = (prefix[hi + 1] - prefix[lo]) / Scalar(hi - lo + 1);
  }
  return out;
}

}  // namespace subwave
