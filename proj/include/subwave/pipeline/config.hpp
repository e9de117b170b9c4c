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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subwave::pipeline {

enum class Mode { Simulate, Ingest };

/// [simulate] section: scene, clock model, trajectory and impairments.
struct SimulateConfig {
  std::complex<double> static_1{0.3, 0.0};
  std::complex<double> static_2{1.0, 0.0};
  double dyn_amp_1 = 1.0;
  double dyn_amp_2 = 0.55;
  double path_delta_m = 0.0605;
  double duration_s = 10.0;  // length of the synthesized trace

  TrajectoryKind trajectory = TrajectoryKind::ConstantSpeed;
  TrajectoryParams motion{0.0, 0.02, 10.0, 0.0, 0.0, 0.0, {}};

  ClockOffsetModel clock{};
  std::optional<double> snr_db;  // additive complex Gaussian noise; absent = noise-free
  double impulse_rate = 0.0;     // fraction of samples hit by amplitude impulses
  double impulse_gain = 3.0;
};

struct PipelineConfig {
  double wavelength_m = 0.121;
  double sample_rate_hz = 1000.0;
  double window_s = 0.5;
  double hop_s = 0.25;
  Index hampel_half_window = 5;
  double hampel_n_mad = 3.0;
  int denominator_antenna = 2;
  double magnitude_floor = 1e-9;
  Mode mode = Mode::Simulate;
  std::string trace_path;
  std::uint64_t seed = 0;

  // A window's circle and envelope are fitted over a span grown (by hop_s on
  // each side) until the ratio has swept this many radians, capped at
  // fit_max_span_s. 0 keeps the plain window.
  double fit_min_sweep_rad = two_pi<double>;
  double fit_max_span_s = 10.0;
  // Moving-average half width applied to the filtered |H2| used as the
  // correction weight. 0 disables.
  Index amplitude_smooth_half_window = 10;
  double near_center_fraction = 0.05;

  SimulateConfig simulate{};

  /// Throws ErrorKind::InvalidInput on inconsistent values.
  void validate() const;

  /// Builds the simulation scene (trajectory included).
  MultipathScene<double> scene() const;
};

/// Every recognized key, in the order written by `to_text`. Keys of the
/// [simulate] section are listed with a "simulate." prefix.
const std::vector<std::string>& config_keys();

/// Applies one `key = value` assignment. `key` may carry the "simulate."
/// prefix or be the bare name of a [simulate] key. Throws ErrorKind::Parse.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

/// Reads a flat `key = value` file with an optional [simulate] section.
/// Comment lines start with ';' or '#'.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text);

/// Serializes every key (round-trips through parse_config).
std::string to_text(const PipelineConfig& config);

}  // namespace subwave::pipeline
