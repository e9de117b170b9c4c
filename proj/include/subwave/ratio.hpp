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

#include <utility>
#include <vector>

namespace subwave {

/// H1(t) / H2(t). Samples whose denominator fell below the magnitude floor are
/// listed in `rejected` and carry the nearest preceding valid ratio (the first
/// valid one if none precedes), so the trace stays finite.
template <typename Scalar = double>
struct RatioTrace {
  Vector<Scalar> timestamps;
  ComplexVector<Scalar> samples;
  std::vector<Index> rejected;

  Index size() const noexcept { return timestamps.size(); }
};

struct RatioOptions {
  double magnitude_floor = 1e-9;
  double max_rejected_fraction = 0.01;
};

template <typename Scalar>
RatioTrace<Scalar> compute_ratio(const ChannelTrace<Scalar>& h1, const ChannelTrace<Scalar>& h2,
                                 const RatioOptions& options = {}) {
  detail::require(h1.size() == h2.size(), "compute_ratio: traces differ in length");
  detail::require(h1.timestamps() == h2.timestamps(), "compute_ratio: traces have different timestamps");

  const Index n = h1.size();
  RatioTrace<Scalar> out{h1.timestamps(), ComplexVector<Scalar>(n), {}};
  const Scalar floor = static_cast<Scalar>(options.magnitude_floor);
  for (Index i = 0; i < n; ++i) {
    const auto den = h2.samples()[i];
    if (std::abs(den) < floor) {
      out.rejected.push_back(i);
      continue;
    }
    out.samples[i] = h1.samples()[i] / den;
  }

  const double fraction = n > 0 ? static_cast<double>(out.rejected.size()) / static_cast<double>(n) : 0.0;
  if (fraction > options.max_rejected_fraction || (n > 0 && out.rejected.size() == static_cast<std::size_t>(n))) {
    throw Error(ErrorKind::Degenerate,
                "compute_ratio: " + std::to_string(out.rejected.size()) + " of " + std::to_string(n) +
                    " denominator samples below magnitude floor",
                fraction);
  }

  if (!out.rejected.empty()) {
    std::vector<bool> bad(static_cast<std::size_t>(n), false);
    for (Index i : out.rejected) bad[static_cast<std::size_t>(i)] = true;
    Index first_good = 0;
    while (bad[static_cast<std::size_t>(first_good)]) ++first_good;
    for (Index i = 0; i < n; ++i) {
      if (!bad[static_cast<std::size_t>(i)]) continue;
      out.samples[i] = i < first_good ? out.samples[first_good] : out.samples[i - 1];
    }
  }
  return out;
}

}  // namespace subwave
