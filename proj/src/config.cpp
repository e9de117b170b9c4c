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

#include "subwave/pipeline/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace subwave::pipeline {

namespace {

const char* kSimulatePrefix = "simulate.";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(ErrorKind::Parse, "config: key '" + key + "': " + why + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, value, "expected a number");
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, value, "expected an integer");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "t:d, t:d, ..."
std::vector<std::pair<double, double>> to_knots(const std::string& key, const std::string& value) {
  std::vector<std::pair<double, double>> knots;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) bad_value(key, value, "knots must be 't:d' pairs separated by commas");
    knots.emplace_back(to_double(key, item.substr(0, colon)), to_double(key, item.substr(colon + 1)));
  }
  return knots;
}

const char* trajectory_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::ConstantSpeed: return "constant-speed";
    case TrajectoryKind::Piecewise: return "piecewise";
    case TrajectoryKind::Sinusoidal: return "sinusoidal";
  }
  return "constant-speed";
}

struct Field {
  std::string key;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

Field real(std::string key, double PipelineConfig::*member) {
  return {key, [key, member](PipelineConfig& c, const std::string& v) { c.*member = to_double(key, v); },
          [member](const PipelineConfig& c) { return format_double(c.*member); }};
}

Field sim_real(std::string key, double SimulateConfig::*member) {
  return {key, [key, member](PipelineConfig& c, const std::string& v) { c.simulate.*member = to_double(key, v); },
          [member](const PipelineConfig& c) { return format_double(c.simulate.*member); }};
}

Field motion_real(std::string key, double TrajectoryParams::*member) {
  return {key,
          [key, member](PipelineConfig& c, const std::string& v) { c.simulate.motion.*member = to_double(key, v); },
          [member](const PipelineConfig& c) { return format_double(c.simulate.motion.*member); }};
}

Field clock_real(std::string key, double ClockOffsetModel::*member) {
  return {key,
          [key, member](PipelineConfig& c, const std::string& v) { c.simulate.clock.*member = to_double(key, v); },
          [member](const PipelineConfig& c) { return format_double(c.simulate.clock.*member); }};
}

Field complex_part(std::string key, std::complex<double> SimulateConfig::*member, bool imaginary) {
  return {key,
          [key, member, imaginary](PipelineConfig& c, const std::string& v) {
            auto& z = c.simulate.*member;
            const double x = to_double(key, v);
            z = imaginary ? std::complex<double>(z.real(), x) : std::complex<double>(x, z.imag());
          },
          [member, imaginary](const PipelineConfig& c) {
            const auto& z = c.simulate.*member;
            return format_double(imaginary ? z.imag() : z.real());
          }};
}

const std::vector<Field>& top_fields() {
  static const std::vector<Field> fields = {
      real("wavelength_m", &PipelineConfig::wavelength_m),
      real("sample_rate_hz", &PipelineConfig::sample_rate_hz),
      real("window_s", &PipelineConfig::window_s),
      real("hop_s", &PipelineConfig::hop_s),
      {"hampel_half_window",
       [](PipelineConfig& c, const std::string& v) { c.hampel_half_window = to_integer("hampel_half_window", v); },
       [](const PipelineConfig& c) { return std::to_string(c.hampel_half_window); }},
      real("hampel_n_mad", &PipelineConfig::hampel_n_mad),
      {"denominator_antenna",
       [](PipelineConfig& c, const std::string& v) {
         c.denominator_antenna = static_cast<int>(to_integer("denominator_antenna", v));
       },
       [](const PipelineConfig& c) { return std::to_string(c.denominator_antenna); }},
      real("magnitude_floor", &PipelineConfig::magnitude_floor),
      {"mode",
       [](PipelineConfig& c, const std::string& v) {
         const std::string m = trim(v);
         if (m == "simulate")
           c.mode = Mode::Simulate;
         else if (m == "ingest")
           c.mode = Mode::Ingest;
         else
           bad_value("mode", v, "expected 'simulate' or 'ingest'");
       },
       [](const PipelineConfig& c) { return std::string(c.mode == Mode::Simulate ? "simulate" : "ingest"); }},
      {"trace", [](PipelineConfig& c, const std::string& v) { c.trace_path = trim(v); },
       [](const PipelineConfig& c) { return c.trace_path; }},
      {"seed",
       [](PipelineConfig& c, const std::string& v) {
         const long long s = to_integer("seed", v);
         if (s < 0) bad_value("seed", v, "expected a non-negative integer");
         c.seed = static_cast<std::uint64_t>(s);
       },
       [](const PipelineConfig& c) { return std::to_string(c.seed); }},
      real("fit_min_sweep_rad", &PipelineConfig::fit_min_sweep_rad),
      real("fit_max_span_s", &PipelineConfig::fit_max_span_s),
      {"amplitude_smooth_half_window",
       [](PipelineConfig& c, const std::string& v) {
         c.amplitude_smooth_half_window = to_integer("amplitude_smooth_half_window", v);
       },
       [](const PipelineConfig& c) { return std::to_string(c.amplitude_smooth_half_window); }},
      real("near_center_fraction", &PipelineConfig::near_center_fraction),
  };
  return fields;
}

const std::vector<Field>& simulate_fields() {
  static const std::vector<Field> fields = {
      complex_part("static_1_re", &SimulateConfig::static_1, false),
      complex_part("static_1_im", &SimulateConfig::static_1, true),
      complex_part("static_2_re", &SimulateConfig::static_2, false),
      complex_part("static_2_im", &SimulateConfig::static_2, true),
      sim_real("dyn_amp_1", &SimulateConfig::dyn_amp_1),
      sim_real("dyn_amp_2", &SimulateConfig::dyn_amp_2),
      sim_real("path_delta_m", &SimulateConfig::path_delta_m),
      sim_real("duration_s", &SimulateConfig::duration_s),
      {"trajectory",
       [](PipelineConfig& c, const std::string& v) {
         const std::string k = trim(v);
         if (k == "constant-speed")
           c.simulate.trajectory = TrajectoryKind::ConstantSpeed;
         else if (k == "piecewise")
           c.simulate.trajectory = TrajectoryKind::Piecewise;
         else if (k == "sinusoidal")
           c.simulate.trajectory = TrajectoryKind::Sinusoidal;
         else
           bad_value("trajectory", v, "expected constant-speed, piecewise or sinusoidal");
       },
       [](const PipelineConfig& c) { return std::string(trajectory_name(c.simulate.trajectory)); }},
      motion_real("start_m", &TrajectoryParams::start_m),
      motion_real("speed_mps", &TrajectoryParams::speed_mps),
      motion_real("motion_duration_s", &TrajectoryParams::duration_s),
      motion_real("amplitude_m", &TrajectoryParams::amplitude_m),
      motion_real("frequency_hz", &TrajectoryParams::frequency_hz),
      motion_real("phase_rad", &TrajectoryParams::phase_rad),
      {"knots", [](PipelineConfig& c, const std::string& v) { c.simulate.motion.knots = to_knots("knots", v); },
       [](const PipelineConfig& c) {
         std::string out;
         for (const auto& [t, d] : c.simulate.motion.knots) {
           if (!out.empty()) out += ", ";
           out += format_double(t) + ":" + format_double(d);
         }
         return out;
       }},
      clock_real("cfo_hz", &ClockOffsetModel::cfo_hz),
      clock_real("sfo_ppm", &ClockOffsetModel::sfo_ppm),
      clock_real("sfo_reference_hz", &ClockOffsetModel::sfo_reference_hz),
      clock_real("jitter_rad_std", &ClockOffsetModel::jitter_rad_std),
      {"snr_db",
       [](PipelineConfig& c, const std::string& v) {
         const std::string s = trim(v);
         if (s.empty() || s == "none")
           c.simulate.snr_db.reset();
         else
           c.simulate.snr_db = to_double("snr_db", s);
       },
       [](const PipelineConfig& c) {
         return c.simulate.snr_db ? format_double(*c.simulate.snr_db) : std::string("none");
       }},
      sim_real("impulse_rate", &SimulateConfig::impulse_rate),
      sim_real("impulse_gain", &SimulateConfig::impulse_gain),
  };
  return fields;
}

const Field* find_field(const std::string& key) {
  std::string bare = key;
  bool prefixed = false;
  if (bare.rfind(kSimulatePrefix, 0) == 0) {
    bare = bare.substr(std::char_traits<char>::length(kSimulatePrefix));
    prefixed = true;
  }
  if (!prefixed) {
    for (const auto& f : top_fields())
      if (f.key == bare) return &f;
  }
  for (const auto& f : simulate_fields())
    if (f.key == bare) return &f;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : top_fields()) k.push_back(f.key);
    for (const auto& f : simulate_fields()) k.push_back(kSimulatePrefix + f.key);
    return k;
  }();
  return keys;
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
  const Field* f = find_field(trim(key));
  if (!f) throw Error(ErrorKind::Parse, "config: unknown key '" + key + "'");
  f->set(config, value);
}

void PipelineConfig::validate() const {
  detail::require(wavelength_m > 0.0, "config: wavelength_m must be > 0");
  detail::require(sample_rate_hz > 0.0, "config: sample_rate_hz must be > 0");
  detail::require(window_s > 0.0, "config: window_s must be > 0");
  detail::require(hop_s > 0.0 && hop_s <= window_s, "config: hop_s must be in (0, window_s]");
  detail::require(hampel_half_window >= 1, "config: hampel_half_window must be >= 1");
  detail::require(hampel_n_mad > 0.0, "config: hampel_n_mad must be > 0");
  detail::require(denominator_antenna == 1 || denominator_antenna == 2, "config: denominator_antenna must be 1 or 2");
  detail::require(magnitude_floor >= 0.0, "config: magnitude_floor must be >= 0");
  detail::require(fit_min_sweep_rad >= 0.0, "config: fit_min_sweep_rad must be >= 0");
  detail::require(fit_max_span_s >= window_s, "config: fit_max_span_s must be >= window_s");
  detail::require(amplitude_smooth_half_window >= 0, "config: amplitude_smooth_half_window must be >= 0");
  detail::require(near_center_fraction >= 0.0 && near_center_fraction < 1.0,
                  "config: near_center_fraction must be in [0, 1)");
  if (mode == Mode::Ingest) {
    detail::require(!trace_path.empty(), "config: ingest mode needs a trace path");
  } else {
    detail::require(simulate.duration_s > 0.0, "config: simulate.duration_s must be > 0");
    detail::require(simulate.impulse_rate >= 0.0 && simulate.impulse_rate <= 1.0,
                    "config: simulate.impulse_rate must be in [0, 1]");
    scene().validate();
    simulate.clock.validate();
  }
}

MultipathScene<double> PipelineConfig::scene() const {
  MultipathScene<double> s;
  s.wavelength_m = wavelength_m;
  s.static_1 = simulate.static_1;
  s.static_2 = simulate.static_2;
  s.dyn_amp_1 = simulate.dyn_amp_1;
  s.dyn_amp_2 = simulate.dyn_amp_2;
  s.path_delta_m = simulate.path_delta_m;
  s.trajectory = sample_trajectory(simulate.trajectory, simulate.motion);
  return s;
}

PipelineConfig parse_config(const std::string& text) {
  // Boost's INI reader only knows ';' comments.
  std::stringstream cleaned;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty() && t[0] == '#') {
        cleaned << '\n';
        continue;
      }
      cleaned << line << '\n';
    }
  }

  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(cleaned, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Parse, "config: line " + std::to_string(e.line()) + ": " + e.message());
  }

  PipelineConfig config;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      set_config_value(config, key, node.data());
      continue;
    }
    if (key != "simulate") throw Error(ErrorKind::Parse, "config: unknown section [" + key + "]");
    for (const auto& [sub, leaf] : node) {
      const Field* f = nullptr;
      for (const auto& candidate : simulate_fields())
        if (candidate.key == sub) f = &candidate;
      if (!f) throw Error(ErrorKind::Parse, "config: unknown key '" + sub + "' in [simulate]");
      f->set(config, leaf.data());
    }
  }
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const PipelineConfig& config) {
  std::string out;
  for (const auto& f : top_fields()) out += f.key + " = " + f.get(config) + "\n";
  out += "\n[simulate]\n";
  for (const auto& f : simulate_fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

}  // namespace subwave::pipeline
