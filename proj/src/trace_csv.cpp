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

#include "subwave/pipeline/trace_csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace subwave::pipeline {

namespace {

constexpr std::string_view kHeader = "t,ant1_re,ant1_im,ant2_re,ant2_im";
constexpr std::string_view kTruthColumn = ",d_truth";

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::Parse, "trace csv: line " + std::to_string(line) + ": " + what);
}

void append(std::string& out, double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

TraceFile parse_trace_csv(const std::string& text) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty()) parse_error(1, "missing header");

  bool has_truth = false;
  if (lines[0] == kHeader) {
    has_truth = false;
  } else if (lines[0].size() == kHeader.size() + kTruthColumn.size() && lines[0].substr(0, kHeader.size()) == kHeader &&
             lines[0].substr(kHeader.size()) == kTruthColumn) {
    has_truth = true;
  } else {
    parse_error(1, "expected header '" + std::string(kHeader) + "[,d_truth]'");
  }
  const std::size_t columns = has_truth ? 6 : 5;

  std::vector<std::array<double, 6>> rows;
  rows.reserve(lines.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string_view line = lines[li];
    const std::size_t line_no = li + 1;
    if (line.empty()) {
      // Only trailing blank lines are tolerated.
      for (std::size_t lj = li; lj < lines.size(); ++lj)
        if (!lines[lj].empty()) parse_error(line_no, "blank line inside data");
      break;
    }
    std::array<double, 6> row{};
    std::size_t col = 0, pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      const std::string_view field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      if (col >= columns) parse_error(line_no, "too many fields (expected " + std::to_string(columns) + ")");
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        parse_error(line_no, "column " + std::to_string(col + 1) + ": not a number: '" + std::string(field) + "'");
      if (!std::isfinite(v)) parse_error(line_no, "column " + std::to_string(col + 1) + ": non-finite value");
      row[col++] = v;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (col != columns)
      parse_error(line_no, "expected " + std::to_string(columns) + " fields, found " + std::to_string(col));
    rows.push_back(row);
  }

  const Index n = static_cast<Index>(rows.size());
  Vector<double> t(n);
  ComplexVector<double> a1(n), a2(n);
  Vector<double> truth(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    t[i] = r[0];
    a1[i] = {r[1], r[2]};
    a2[i] = {r[3], r[4]};
    truth[i] = r[5];
    if (i > 0 && !(t[i] > t[i - 1]))
      throw Error(ErrorKind::InvalidInput,
                  "trace csv: line " + std::to_string(i + 2) + ": timestamps not strictly increasing");
  }
  if (n >= 3) {
    const double period = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) {
      if (std::abs(t[i] - (t[0] + static_cast<double>(i) * period)) >= 0.1 * period)
        throw Error(ErrorKind::InvalidInput, "trace csv: line " + std::to_string(i + 2) +
                                                 ": timestamp deviates from the uniform grid by >= 10% of a period");
    }
  }

  TraceFile out{ChannelTrace<double>(t, std::move(a1)), ChannelTrace<double>(t, std::move(a2)), std::nullopt};
  if (has_truth) out.d_truth = std::move(truth);
  return out;
}

TraceFile read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "trace csv: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str());
}

std::string format_trace_csv(const TraceFile& trace) {
  const Index n = trace.antenna1.size();
  detail::require(trace.antenna2.size() == n && trace.antenna1.timestamps() == trace.antenna2.timestamps(),
                  "trace csv: antenna traces must share timestamps");
  detail::require(!trace.d_truth || trace.d_truth->size() == n, "trace csv: truth column length mismatch");

  std::string out(kHeader);
  if (trace.d_truth) out += kTruthColumn;
  out += '\n';
  out.reserve(out.size() + static_cast<std::size_t>(n) * 128);
  for (Index i = 0; i < n; ++i) {
    append(out, trace.antenna1.timestamps()[i]);
    for (const auto& z : {trace.antenna1.samples()[i], trace.antenna2.samples()[i]}) {
      out += ',';
      append(out, z.real());
      out += ',';
      append(out, z.imag());
    }
    if (trace.d_truth) {
      out += ',';
      append(out, (*trace.d_truth)[i]);
    }
    out += '\n';
  }
  return out;
}

void write_trace_csv(const std::string& path, const TraceFile& trace) {
  const std::string text = format_trace_csv(trace);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "trace csv: cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "trace csv: write failed for '" + path + "'");
}

}  // namespace subwave::pipeline
