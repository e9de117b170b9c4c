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

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace subwave {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

template <typename Scalar>
inline constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  InvalidInput,         // violated precondition or malformed argument
  Parse,                // unreadable file content
  Domain,               // |H_s| <= A regime, integrand pole, etc.
  Degenerate,           // collinear circle fit, near-center angle, concentric scene
  FitFailed,            // optimizer did not converge
  CorrectionUndefined,  // no usable amplitude envelope for an increment
  Io
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::FitFailed: return "fit-failed";
    case ErrorKind::CorrectionUndefined: return "correction-undefined";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<double> metric = std::nullopt)
      : std::runtime_error(what), kind_(kind), metric_(metric) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Diagnostic number attached to the failure (conditioning, residual, ...).
  std::optional<double> metric() const noexcept { return metric_; }

 private:
  ErrorKind kind_;
  std::optional<double> metric_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorKind::InvalidInput, message);
}

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  a = std::remainder(a, two_pi<Scalar>);
  if (a <= -pi) a += two_pi<Scalar>;
  return a;
}

}  // namespace detail

}  // namespace subwave
