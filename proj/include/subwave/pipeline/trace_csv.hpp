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

#include <optional>
#include <string>

namespace subwave::pipeline {

/// Contents of a trace CSV:
///   t,ant1_re,ant1_im,ant2_re,ant2_im[,d_truth]
/// comma-separated, '\n' line endings, one row per sample. d_truth is the
/// antenna-2 reflection path length in meters, pre-aligned with t.
struct TraceFile {
  ChannelTrace<double> antenna1;
  ChannelTrace<double> antenna2;
  std::optional<Vector<double>> d_truth;
};

/// Parses trace CSV text. Errors name the offending line. Timestamps must be
/// strictly increasing and within 10% of a nominal period of a uniform grid.
TraceFile parse_trace_csv(const std::string& text);
TraceFile read_trace_csv(const std::string& path);

/// Writes values with 17 significant digits, so parse(format(x)) == x.
std::string format_trace_csv(const TraceFile& trace);
void write_trace_csv(const std::string& path, const TraceFile& trace);

}  // namespace subwave::pipeline
