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

#include "subwave/pipeline/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace subwave::pipeline {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void put_metrics(std::ostringstream& os, const char* prefix, const MethodMetrics& m) {
  os << prefix << ".max_abs_error_m = " << num(m.max_abs_error_m) << '\n';
  os << prefix << ".median_abs_error_m = " << num(m.median_abs_error_m) << '\n';
  os << prefix << ".p90_abs_error_m = " << num(m.p90_abs_error_m) << '\n';
  os << prefix << ".final_error_m = " << num(m.final_error_m) << '\n';
}

}  // namespace

std::string format_displacement_csv(const RunReport& report) {
  std::ostringstream os;
  os << 't';
  if (report.baseline) os << ",d_baseline";
  if (report.corrected) os << ",d_corrected";
  if (report.truth_m) os << ",d_truth";
  os << '\n';
  for (Index i = 0; i < report.timestamps.size(); ++i) {
    os << num(report.timestamps[i]);
    if (report.baseline) os << ',' << num(report.baseline->delta_d_m[i]);
    if (report.corrected) os << ',' << num(report.corrected->delta_d_m[i]);
    if (report.truth_m) os << ',' << num((*report.truth_m)[i]);
    os << '\n';
  }
  return os.str();
}

std::string format_metrics(const RunReport& report) {
  std::ostringstream os;
  os << "status = " << (report.ok() ? "ok" : "failed") << '\n';
  if (report.failure) {
    os << "failed_stage = " << to_string(report.failure->stage) << '\n';
    os << "failure_kind = " << to_string(report.failure->kind) << '\n';
    os << "failure_message = " << report.failure->message << '\n';
  }
  os << "exit_code = " << report.exit_code() << '\n';
  os << "completed_stages = ";
  for (std::size_t i = 0; i < report.completed.size(); ++i) os << (i ? "," : "") << to_string(report.completed[i]);
  os << '\n';
  os << "mode = " << (report.simulated ? "simulate" : "ingest") << '\n';
  os << "samples = " << report.timestamps.size() << '\n';
  os << "ratio_rejected = " << report.ratio_rejected << '\n';
  os << "angle_ambiguous = " << report.angle_ambiguous << '\n';
  os << "hampel_replaced = " << report.hampel_replaced << '\n';

  std::size_t fitted = 0, reused_static = 0, reused_error = 0, back_filled = 0, missing = 0, circle_fallback = 0;
  for (const auto& w : report.windows) {
    switch (w.envelope_source) {
      case EnvelopeSource::Fitted: ++fitted; break;
      case EnvelopeSource::ReusedAfterStatic: ++reused_static; break;
      case EnvelopeSource::ReusedAfterFitError: ++reused_error; break;
      case EnvelopeSource::BackFilled: ++back_filled; break;
      case EnvelopeSource::Missing: ++missing; break;
    }
    if (!w.circle_from_window) ++circle_fallback;
  }
  os << "windows = " << report.windows.size() << '\n';
  os << "windows_circle_fallback = " << circle_fallback << '\n';
  os << "windows_envelope_fitted = " << fitted << '\n';
  os << "windows_envelope_reused_static = " << reused_static << '\n';
  os << "windows_envelope_reused_fit_error = " << reused_error << '\n';
  os << "windows_envelope_back_filled = " << back_filled << '\n';
  os << "windows_envelope_missing = " << missing << '\n';
  if (report.global_circle) {
    os << "circle_center_re = " << num(report.global_circle->center.real()) << '\n';
    os << "circle_center_im = " << num(report.global_circle->center.imag()) << '\n';
    os << "circle_radius = " << num(report.global_circle->radius) << '\n';
    os << "circle_rms_residual = " << num(report.global_circle->rms_residual) << '\n';
  }
  if (!report.truth_m) {
    os << "metrics = no ground truth\n";
  } else {
    if (report.baseline_metrics) put_metrics(os, "baseline", *report.baseline_metrics);
    if (report.corrected_metrics) put_metrics(os, "corrected", *report.corrected_metrics);
  }
  return os.str();
}

std::string format_windows_csv(const RunReport& report) {
  std::ostringstream os;
  os << "index,start_s,end_s,fit_start_s,fit_end_s,sweep_rad,circle_source,center_re,center_im,radius,"
        "rms_residual,envelope_source,max_amp,min_amp,omega_rad_s,beta_rad,window_start_s,fit_rmse\n";
  for (std::size_t i = 0; i < report.windows.size(); ++i) {
    const auto& w = report.windows[i];
    os << i << ',' << num(w.start_s) << ',' << num(w.end_s) << ',' << num(w.fit_start_s) << ','
       << num(w.fit_end_s) << ',' << num(w.sweep_rad) << ',' << (w.circle_from_window ? "window" : "global") << ','
       << num(w.circle.center.real()) << ',' << num(w.circle.center.imag()) << ',' << num(w.circle.radius) << ','
       << num(w.circle.rms_residual) << ',' << to_string(w.envelope_source);
    if (w.envelope) {
      const auto& e = *w.envelope;
      os << ',' << num(e.max_amp) << ',' << num(e.min_amp) << ',' << num(e.omega_rad_s) << ','
         << num(e.beta_rad) << ',' << num(e.window_start) << ',' << num(e.fit_rmse);
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  }
  return os.str();
}

void emit_outputs(const RunReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir + ": " + ec.message());
  write_file(dir / "displacement.csv", format_displacement_csv(report));
  write_file(dir / "metrics.txt", format_metrics(report));
  write_file(dir / "windows.csv", format_windows_csv(report));
  if (report.simulated && report.input) write_file(dir / "trace.csv", format_trace_csv(*report.input));
}

}  // namespace subwave::pipeline
