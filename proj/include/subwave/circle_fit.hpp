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

#include <Eigen/Dense>

namespace subwave {

template <typename Scalar = double>
struct RatioCircle {
  std::complex<Scalar> center{0, 0};
  Scalar radius = 0;
  Scalar rms_residual = 0;  // RMS of | |z - center| - radius |
};

struct CircleFitOptions {
  // Reciprocal condition number of the normalized design matrix below which
  // the samples are treated as collinear.
  double min_conditioning = 1e-8;
};

/// Algebraic (Kasa) least-squares circle through complex samples.
///
/// Solves |z|^2 = 2 Re(conj(c) z) + (r^2 - |c|^2) in the least-squares sense
/// on centroid-shifted, RMS-scaled coordinates. Throws ErrorKind::Degenerate
/// carrying the conditioning metric when the samples are (nearly) collinear.
template <typename Derived>
RatioCircle<typename Derived::Scalar::value_type> fit_circle(const Eigen::MatrixBase<Derived>& samples,
                                                             const CircleFitOptions& options = {}) {
  using Scalar = typename Derived::Scalar::value_type;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

  const Index n = samples.size();
  if (n < 3) throw Error(ErrorKind::InvalidInput, "fit_circle: need at least 3 samples");

  const std::complex<Scalar> centroid = samples.mean();
  Scalar scale = std::sqrt((samples.array() - centroid).abs2().mean());
  if (!(scale > Scalar(0)) || !std::isfinite(scale))
    throw Error(ErrorKind::Degenerate, "fit_circle: all samples coincide", 0.0);

  Mat design(n, 3);
  Vector<Scalar> rhs(n);
  for (Index i = 0; i < n; ++i) {
    const std::complex<Scalar> w = (samples[i] - centroid) / scale;
    design(i, 0) = w.real();
    design(i, 1) = w.imag();
    design(i, 2) = Scalar(1);
    rhs[i] = std::norm(w);
  }

  const Eigen::Matrix<Scalar, 3, 3> normal = design.transpose() * design;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 3, 3>> eig(normal, Eigen::EigenvaluesOnly);
  const Scalar lmin = std::max(eig.eigenvalues()(0), Scalar(0));
  const Scalar lmax = eig.eigenvalues()(2);
  const Scalar conditioning = lmax > Scalar(0) ? std::sqrt(lmin / lmax) : Scalar(0);
  if (conditioning < static_cast<Scalar>(options.min_conditioning))
    throw Error(ErrorKind::Degenerate, "fit_circle: samples are collinear or nearly so",
                static_cast<double>(conditioning));

  const Eigen::Matrix<Scalar, 3, 1> sol = design.colPivHouseholderQr().solve(rhs);
  const std::complex<Scalar> c_norm(sol(0) / 2, sol(1) / 2);
  const Scalar r2 = sol(2) + std::norm(c_norm);
  if (!(r2 > Scalar(0)))
    throw Error(ErrorKind::Degenerate, "fit_circle: non-positive squared radius", static_cast<double>(r2));

  RatioCircle<Scalar> circle;
  circle.center = centroid + scale * c_norm;
  circle.radius = scale * std::sqrt(r2);

  Scalar ss = 0;
  for (Index i = 0; i < n; ++i) {
    const Scalar d = std::abs(samples[i] - circle.center) - circle.radius;
    ss += d * d;
  }
  circle.rms_residual = std::sqrt(ss / Scalar(n));
  return circle;
}

}  // namespace subwave
