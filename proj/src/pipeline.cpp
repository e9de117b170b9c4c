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

#include "subwave/amplitude_filter.hpp"

#include <algorithm>
#include <map>

namespace subwave::pipeline {

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::Input: return "input";
    case Stage::Ratio: return "ratio";
    case Stage::CircleFit: return "circle-fit";
    case Stage::Rotation: return "rotation";
    case Stage::Baseline: return "baseline";
    case Stage::AmplitudeFilter: return "amplitude-filter";
    case Stage::EnvelopeFit: return "envelope-fit";
    case Stage::Correction: return "correction";
    case Stage::Accumulation: return "accumulation";
  }
  return "unknown";
}

const char* to_string(EnvelopeSource source) {
  switch (source) {
    case EnvelopeSource::Fitted: return "fitted";
    case EnvelopeSource::ReusedAfterStatic: return "reused-static";
    case EnvelopeSource::ReusedAfterFitError: return "reused-fit-error";
    case EnvelopeSource::BackFilled: return "back-filled";
    case EnvelopeSource::Missing: return "missing";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Parse: return 2;
    case ErrorKind::Domain:
    case ErrorKind::Degenerate:
    case ErrorKind::FitFailed:
    case ErrorKind::CorrectionUndefined: return 3;
    case ErrorKind::Io: return 4;
  }
  return 3;
}

double percentile(std::vector<double> values, double q) {
  detail::require(!values.empty(), "percentile: empty input");
  detail::require(q >= 0.0 && q <= 1.0, "percentile: q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

MethodMetrics compute_metrics(const Vector<double>& estimate, const Vector<double>& truth) {
  detail::require(estimate.size() == truth.size() && estimate.size() > 0, "compute_metrics: length mismatch");
  std::vector<double> err(static_cast<std::size_t>(estimate.size()));
  for (Index i = 0; i < estimate.size(); ++i) err[static_cast<std::size_t>(i)] = std::abs(estimate[i] - truth[i]);
  MethodMetrics m;
  m.max_abs_error_m = *std::max_element(err.begin(), err.end());
  m.median_abs_error_m = percentile(err, 0.5);
  m.p90_abs_error_m = percentile(err, 0.9);
  m.final_error_m = estimate[estimate.size() - 1] - truth[truth.size() - 1];
  return m;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct WindowLayout {
  double start, end;  // nominal window
  Index lo, hi;       // nominal sample range, inclusive
  Index fit_lo, fit_hi;
};

Index first_at_or_after(const Vector<double>& t, double v) {
  return static_cast<Index>(std::lower_bound(t.data(), t.data() + t.size(), v) - t.data());
}

Index last_at_or_before(const Vector<double>& t, double v) {
  return static_cast<Index>(std::upper_bound(t.data(), t.data() + t.size(), v) - t.data()) - 1;
}

std::vector<WindowLayout> layout_windows(const Vector<double>& t, const PipelineConfig& config) {
  const Index n = t.size();
  const double t0 = t[0], t_end = t[n - 1];
  const double slack = 1e-9 * std::max(config.window_s, 1.0);
  std::vector<std::pair<double, double>> nominal;
  if (t_end - t0 <= config.window_s + slack) {
    nominal.emplace_back(t0, t_end);
  } else {
    for (Index j = 0;; ++j) {
      const double s = t0 + static_cast<double>(j) * config.hop_s;
      if (s + config.window_s > t_end + slack) break;
      nominal.emplace_back(s, s + config.window_s);
    }
    if (nominal.back().second < t_end - slack) nominal.emplace_back(t_end - config.window_s, t_end);
  }
  std::vector<WindowLayout> out;
  for (const auto& [s, e] : nominal) {
    WindowLayout w{s, e, first_at_or_after(t, s - slack), last_at_or_before(t, e + slack), 0, 0};
    w.fit_lo = w.lo;
    w.fit_hi = w.hi;
    out.push_back(w);
  }
  return out;
}

// Grows each window's fit span symmetrically by hop_s until the ratio has
// rotated fit_min_sweep_rad inside it, the span would exceed fit_max_span_s,
// or it covers the whole trace.
void grow_fit_spans(std::vector<WindowLayout>& windows, const Vector<double>& t, const Vector<double>& phi,
                    const PipelineConfig& config) {
  const Index n = t.size();
  const double t0 = t[0], t_end = t[n - 1];
  const double slack = 1e-9 * std::max(config.window_s, 1.0);
  for (auto& w : windows) {
    double a = w.start, b = w.end;
    while (true) {
      const Index lo = first_at_or_after(t, a - slack), hi = last_at_or_before(t, b + slack);
      w.fit_lo = lo;
      w.fit_hi = hi;
      const auto seg = phi.segment(lo, hi - lo + 1);
      if (seg.maxCoeff() - seg.minCoeff() >= config.fit_min_sweep_rad) break;
      if (a <= t0 + slack && b >= t_end - slack) break;
      const double na = std::max(t0, a - config.hop_s), nb = std::min(t_end, b + config.hop_s);
      if (nb - na > config.fit_max_span_s + slack) break;
      a = na;
      b = nb;
    }
  }
}

// Each increment goes to the window whose nominal center is nearest its midpoint.
std::vector<Index> assign_increments(const Vector<double>& t, const std::vector<WindowLayout>& windows) {
  const Index m = std::max<Index>(t.size() - 1, 0);
  std::vector<Index> out(static_cast<std::size_t>(m), 0);
  std::size_t w = 0;
  for (Index i = 0; i < m; ++i) {
    const double mid = 0.5 * (t[i] + t[i + 1]);
    const auto center = [&](std::size_t k) { return 0.5 * (windows[k].start + windows[k].end); };
    while (w + 1 < windows.size() && std::abs(center(w + 1) - mid) < std::abs(center(w) - mid)) ++w;
    out[static_cast<std::size_t>(i)] = static_cast<Index>(w);
  }
  return out;
}

}  // namespace

TraceFile simulate_traces(const PipelineConfig& config) {
  const auto& sim = config.simulate;
  const auto n = static_cast<Index>(std::floor(sim.duration_s * config.sample_rate_hz + 1e-9)) + 1;
  const Vector<double> t = uniform_timestamps(config.sample_rate_hz, n);
  const MultipathScene<double> scene = config.scene();
  auto [h1, h2] = synthesize_ideal(scene, t);

  ClockOffsetModel clock = sim.clock;
  clock.seed = mix_seed(config.seed, 0);
  h1 = apply_clock_offsets(h1, clock);
  h2 = apply_clock_offsets(h2, clock);
  if (sim.snr_db) {
    h1 = add_complex_noise(h1, *sim.snr_db, mix_seed(config.seed, 1));
    h2 = add_complex_noise(h2, *sim.snr_db, mix_seed(config.seed, 2));
  }
  if (sim.impulse_rate > 0.0) {
    h1 = add_amplitude_impulses(h1, sim.impulse_rate, sim.impulse_gain, mix_seed(config.seed, 3));
    h2 = add_amplitude_impulses(h2, sim.impulse_rate, sim.impulse_gain, mix_seed(config.seed, 3));
  }
  Vector<double> truth(n);
  for (Index i = 0; i < n; ++i) truth[i] = scene.trajectory(t[i]);
  return {std::move(h1), std::move(h2), std::move(truth)};
}

RunReport run_pipeline(const PipelineConfig& config, const RunHooks& hooks) {
  RunReport report;

  const auto run = [&](Stage stage, const auto& body) {
    if (report.failure) return false;
    try {
      if (hooks.before_stage) hooks.before_stage(stage);
      body();
      report.completed.push_back(stage);
      return true;
    } catch (const Error& e) {
      report.failure = StageFailure{stage, e.kind(), e.what()};
    } catch (const std::exception& e) {
      report.failure = StageFailure{stage, ErrorKind::Domain, e.what()};
    }
    return false;
  };

  const ChannelTrace<double>* numerator = nullptr;
  const ChannelTrace<double>* denominator = nullptr;
  run(Stage::Input, [&] {
    config.validate();
    report.simulated = config.mode == Mode::Simulate;
    report.input = report.simulated ? simulate_traces(config) : read_trace_csv(config.trace_path);
    if (report.input->antenna1.size() < 2) throw Error(ErrorKind::InvalidInput, "input: need at least 2 samples");
    report.timestamps = report.input->antenna1.timestamps();
    if (report.input->d_truth) {
      const auto& d = *report.input->d_truth;
      report.truth_m = (d.array() - d[0]).matrix();
    }
    if (report.simulated) {
      const auto& s = config.simulate;
      report.denominator_static_dominant = config.denominator_antenna == 2 ? std::abs(s.static_2) > s.dyn_amp_2
                                                                           : std::abs(s.static_1) > s.dyn_amp_1;
    }
    numerator = config.denominator_antenna == 2 ? &report.input->antenna1 : &report.input->antenna2;
    denominator = config.denominator_antenna == 2 ? &report.input->antenna2 : &report.input->antenna1;
  });

  RatioTrace<double> ratio;
  run(Stage::Ratio, [&] {
    ratio = compute_ratio(*numerator, *denominator, RatioOptions{config.magnitude_floor, 0.01});
    report.ratio_rejected = static_cast<Index>(ratio.rejected.size());
  });

  const RotationOptions rotation_options{config.near_center_fraction, 0.01};
  std::vector<WindowLayout> windows;
  std::vector<RatioCircle<double>> circles;
  std::vector<Index> assignment;
  Vector<double> global_phi;
  run(Stage::CircleFit, [&] {
    const RatioCircle<double> global = fit_circle(ratio.samples);
    report.global_circle = global;
    global_phi = extract_rotation(ratio, global, rotation_options).unwrapped_rad;

    windows = layout_windows(ratio.timestamps, config);
    grow_fit_spans(windows, ratio.timestamps, global_phi, config);
    assignment = assign_increments(ratio.timestamps, windows);

    report.windows.resize(windows.size());
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto& win = windows[w];
      auto& diag = report.windows[w];
      diag.start_s = win.start;
      diag.end_s = win.end;
      diag.fit_start_s = ratio.timestamps[win.fit_lo];
      diag.fit_end_s = ratio.timestamps[win.fit_hi];
      const auto seg = global_phi.segment(win.fit_lo, win.fit_hi - win.fit_lo + 1);
      diag.sweep_rad = seg.maxCoeff() - seg.minCoeff();
      try {
        diag.circle = fit_circle(ratio.samples.segment(win.fit_lo, win.fit_hi - win.fit_lo + 1));
        diag.circle_from_window = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Degenerate && e.kind() != ErrorKind::InvalidInput) throw;
        diag.circle = global;
        diag.circle_from_window = false;
      }
      circles.push_back(diag.circle);
    }
  });

  run(Stage::Rotation, [&] {
    report.ratio_angle = extract_rotation_windowed(ratio, std::span<const RatioCircle<double>>(circles),
                                                   std::span<const Index>(assignment), rotation_options);
    report.angle_ambiguous = static_cast<Index>(report.ratio_angle->ambiguous.size());
  });

  run(Stage::Baseline, [&] {
    report.baseline = accumulate_displacement(*report.ratio_angle, config.wavelength_m, Method::Baseline);
    if (report.truth_m) report.baseline_metrics = compute_metrics(report.baseline->delta_d_m, *report.truth_m);
  });

  AmplitudeSeries<double> filtered;
  AmplitudeSeries<double> weights;
  run(Stage::AmplitudeFilter, [&] {
    const AmplitudeSeries<double> raw(*denominator);
    auto h = hampel(raw.magnitude(), config.hampel_half_window, config.hampel_n_mad);
    report.hampel_replaced = static_cast<Index>(h.replaced.size());
    filtered = AmplitudeSeries<double>(raw.timestamps(), std::move(h.values));
    weights = AmplitudeSeries<double>(raw.timestamps(),
                                      moving_average(filtered.magnitude(), config.amplitude_smooth_half_window));
  });

  run(Stage::EnvelopeFit, [&] {
    std::map<std::pair<Index, Index>, EnvelopeFit<double>> cache;
    std::map<std::pair<Index, Index>, std::string> failures;
    std::optional<AmplitudeEnvelope<double>> last_valid;
    const auto& t = ratio.timestamps;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto& win = windows[w];
      auto& diag = report.windows[w];
      const auto key = std::make_pair(win.fit_lo, win.fit_hi);
      if (!cache.count(key) && !failures.count(key)) {
        EnvelopeFitOptions options;
        const double dt = t[win.fit_hi] - t[win.fit_lo];
        const double rate = dt > 0 ? std::abs(global_phi[win.fit_hi] - global_phi[win.fit_lo]) / dt : 0.0;
        if (rate > 0) {
          options.omega_hint = rate;
          options.cycle_ladder = false;
        }
        try {
          cache.emplace(key, fit_envelope(filtered.segment(win.fit_lo, win.fit_hi - win.fit_lo + 1), options));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::FitFailed && e.kind() != ErrorKind::InvalidInput) throw;
          failures.emplace(key, e.what());
        }
      }
      if (auto it = cache.find(key); it != cache.end() && it->second.status == EnvelopeStatus::Fitted) {
        diag.envelope = it->second.envelope;
        diag.envelope_source = EnvelopeSource::Fitted;
        last_valid = diag.envelope;
        continue;
      }
      const bool failed = failures.count(key) > 0;
      if (failed) diag.envelope_note = failures.at(key);
      if (last_valid) {
        diag.envelope = last_valid;
        diag.envelope_source = failed ? EnvelopeSource::ReusedAfterFitError : EnvelopeSource::ReusedAfterStatic;
      } else {
        diag.envelope_source = EnvelopeSource::Missing;
        if (!failed) diag.envelope_note = "static window";
      }
    }
    // Leading windows had nothing to reuse; give them the first fitted envelope.
    const auto first = std::find_if(report.windows.begin(), report.windows.end(),
                                    [](const WindowDiagnostic& w) { return w.envelope.has_value(); });
    if (first == report.windows.end()) return;
    for (auto it = report.windows.begin(); it != first; ++it) {
      it->envelope = first->envelope;
      it->envelope_source = EnvelopeSource::BackFilled;
    }
  });

  std::optional<AngleSeries<double>> ideal_angle;
  run(Stage::Correction, [&] {
    if (report.denominator_static_dominant && !*report.denominator_static_dominant)
      throw Error(ErrorKind::CorrectionUndefined,
                  "correction: the denominator antenna's dynamic term dominates its static term; "
                  "the amplitude mapping does not apply");
    std::vector<AmplitudeEnvelope<double>> envelopes;
    std::vector<Index> env_of_window(report.windows.size(), -1);
    for (std::size_t w = 0; w < report.windows.size(); ++w) {
      if (!report.windows[w].envelope) continue;
      env_of_window[w] = static_cast<Index>(envelopes.size());
      envelopes.push_back(*report.windows[w].envelope);
    }
    std::vector<Index> env_assignment(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i)
      env_assignment[i] = env_of_window[static_cast<std::size_t>(assignment[i])];
    ideal_angle = correct_increments(*report.ratio_angle, weights,
                                     std::span<const AmplitudeEnvelope<double>>(envelopes),
                                     std::span<const Index>(env_assignment));
  });

  run(Stage::Accumulation, [&] {
    report.corrected = accumulate_displacement(*ideal_angle, config.wavelength_m, Method::Corrected);
    if (report.truth_m) report.corrected_metrics = compute_metrics(report.corrected->delta_d_m, *report.truth_m);
  });

  return report;
}

}  // namespace subwave::pipeline
