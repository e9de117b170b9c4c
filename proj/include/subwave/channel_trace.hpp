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

#include "subwave/core.hpp"

#include <string>
#include <utility>

namespace subwave {

namespace detail {

template <typename Scalar>
void check_timestamps(const Vector<Scalar>& t, const char* what) {
  for (Index i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite timestamp");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw Error(ErrorKind::InvalidInput,
                  std::string(what) + ": timestamps not strictly increasing at index " + std::to_string(i));
  }
}

}  // namespace detail

/// Time-stamped complex channel samples for one receive antenna.
template <typename Scalar = double>
class ChannelTrace {
 public:
  using scalar_type = Scalar;

  ChannelTrace() = default;

  ChannelTrace(Vector<Scalar> timestamps, ComplexVector<Scalar> samples)
      : timestamps_(std::move(timestamps)), samples_(std::move(samples)) {
    detail::require(timestamps_.size() == samples_.size(), "ChannelTrace: timestamps and samples differ in length");
    detail::check_timestamps(timestamps_, "ChannelTrace");
    for (Index i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i].real()) || !std::isfinite(samples_[i].imag()))
        throw Error(ErrorKind::InvalidInput, "ChannelTrace: non-finite sample at index " + std::to_string(i));
    }
  }

  Index size() const noexcept { return timestamps_.size(); }
  const Vector<Scalar>& timestamps() const noexcept { return timestamps_; }
  const ComplexVector<Scalar>& samples() const noexcept { return samples_; }

  Vector<Scalar> magnitude() const { return samples_.cwiseAbs(); }

  bool operator==(const ChannelTrace& other) const {
    return timestamps_.size() == other.timestamps_.size() && samples_.size() == other.samples_.size() &&
           timestamps_ == other.timestamps_ && samples_ == other.samples_;
  }

 private:
  Vector<Scalar> timestamps_;
  ComplexVector<Scalar> samples_;
};

/// |H2(t)| of the denominator antenna.
template <typename Scalar = double>
class AmplitudeSeries {
 public:
  AmplitudeSeries() = default;

  AmplitudeSeries(Vector<Scalar> timestamps, Vector<Scalar> magnitude)
      : timestamps_(std::move(timestamps)), magnitude_(std::move(magnitude)) {
    detail::require(timestamps_.size() == magnitude_.size(), "AmplitudeSeries: length mismatch");
    detail::check_timestamps(timestamps_, "AmplitudeSeries");
    for (Index i = 0; i < magnitude_.size(); ++i) {
      if (!std::isfinite(magnitude_[i]) || magnitude_[i] < Scalar(0))
        throw Error(ErrorKind::InvalidInput, "AmplitudeSeries: magnitude must be finite and >= 0");
    }
  }

  explicit AmplitudeSeries(const ChannelTrace<Scalar>& trace)
      : AmplitudeSeries(trace.timestamps(), trace.magnitude()) {}

  Index size() const noexcept { return timestamps_.size(); }
  const Vector<Scalar>& timestamps() const noexcept { return timestamps_; }
  const Vector<Scalar>& magnitude() const noexcept { return magnitude_; }

  /// Contiguous sub-range [first, first + count).
  AmplitudeSeries segment(Index first, Index count) const {
    return AmplitudeSeries(timestamps_.segment(first, count), magnitude_.segment(first, count));
  }

 private:
  Vector<Scalar> timestamps_;
  Vector<Scalar> magnitude_;
};

}  // namespace subwave
