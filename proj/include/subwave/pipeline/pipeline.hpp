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

#include "subwave/correction.hpp"
#include "subwave/pipeline/config.hpp"
#include "subwave/pipeline/trace_csv.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subwave::pipeline {

enum class Stage {
  Input,
  Ratio,
  CircleFit,
  Rotation,
  Baseline,
  AmplitudeFilter,
  EnvelopeFit,
  Correction,
  Accumulation,
};

const char* to_string(Stage stage);

/// Process exit code for a failure kind: 2 input/parse, 3 numeric/domain, 4 I/O.
int exit_code_for(ErrorKind kind);

struct MethodMetrics {
  double max_abs_error_m = 0;
  double median_abs_error_m = 0;
  double p90_abs_error_m = 0;
  double final_error_m = 0;
};

/// Linear-interpolated percentile (q in [0, 1]) of the sorted values.
double percentile(std::vector<double> values, double q);

MethodMetrics compute_metrics(const Vector<double>& estimate, const Vector<double>& truth);

// Windows without their own fit reuse the most recent fitted envelope; windows
// before the first fit take the first one (BackFilled).
enum class EnvelopeSource { Fitted, ReusedAfterStatic, ReusedAfterFitError, BackFilled, Missing };
const char* to_string(EnvelopeSource source);

struct WindowDiagnostic {
  double start_s = 0;
  double end_s = 0;
  double fit_start_s = 0;  // span actually used for the circle and envelope fits
  double fit_end_s = 0;
  double sweep_rad = 0;    // ratio rotation inside the fit span
  RatioCircle<double> circle;
  bool circle_from_window = true;  // false: fell back to the whole-trace circle
  EnvelopeSource envelope_source = EnvelopeSource::Missing;
  std::optional<AmplitudeEnvelope<double>> envelope;  // envelope used for correction
  std::string envelope_note;                          // fit error text, if any
};

struct StageFailure {
  Stage stage;
  ErrorKind kind;
  std::string message;
};

struct RunReport {
  std::vector<Stage> completed;
  std::optional<StageFailure> failure;

  std::optional<TraceFile> input;  // the analysed traces (antenna 1 and 2 as given)
  bool simulated = false;
  // Simulated runs only: whether the denominator antenna's static term
  // dominates its dynamic term, the regime the correction is derived for.
  std::optional<bool> denominator_static_dominant;
  Vector<double> timestamps;
  std::optional<Vector<double>> truth_m;  // ground-truth path-length change, anchored at 0

  std::optional<RatioCircle<double>> global_circle;
  std::optional<AngleSeries<double>> ratio_angle;
  std::optional<DisplacementSeries<double>> baseline;
  std::optional<DisplacementSeries<double>> corrected;
  std::optional<MethodMetrics> baseline_metrics;
  std::optional<MethodMetrics> corrected_metrics;

  std::vector<WindowDiagnostic> windows;
  Index ratio_rejected = 0;
  Index angle_ambiguous = 0;
  Index hampel_replaced = 0;

  bool ok() const { return !failure.has_value(); }
  int exit_code() const { return failure ? exit_code_for(failure->kind) : 0; }
};

struct RunHooks {
  // Called before each stage starts; throwing from it fails that stage.
  std::function<void(Stage)> before_stage;
};

/// Runs ratio -> circle fit -> rotation -> (baseline) -> amplitude filter ->
/// envelope fits -> correction -> accumulation. Never throws for stage
/// failures: the report records the failing stage and keeps everything
/// computed before it.
RunReport run_pipeline(const PipelineConfig& config, const RunHooks& hooks = {});

/// Synthesizes the (offset-corrupted, noisy) traces described by the
/// [simulate] section, plus the antenna-2 path length as truth.
TraceFile simulate_traces(const PipelineConfig& config);

/// Writes displacement.csv, metrics.txt, windows.csv and, for simulated
/// runs, trace.csv into out_dir (created if needed). Throws ErrorKind::Io.
void emit_outputs(const RunReport& report, const std::string& out_dir);

std::string format_displacement_csv(const RunReport& report);
std::string format_metrics(const RunReport& report);
std::string format_windows_csv(const RunReport& report);

}  // namespace subwave::pipeline
