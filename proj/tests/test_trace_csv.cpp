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

#include "subwave/channel_model.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace subwave;
using namespace subwave::pipeline;

namespace {

const char* kFourRows =
    "t,ant1_re,ant1_im,ant2_re,ant2_im\n"
    "0,1,0,2,0\n"
    "0.001,1,0.1,2,-0.1\n"
    "0.002,0.9,0.2,2,-0.2\n"
    "0.003,0.8,0.3,1.9,-0.3\n";

std::string line_error(const std::string& text) {
  try {
    parse_trace_csv(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("four valid rows") {
  const auto f = parse_trace_csv(kFourRows);
  CHECK(f.antenna1.size() == 4);
  CHECK(f.antenna2.size() == 4);
  CHECK_FALSE(f.d_truth);
  CHECK(f.antenna2.samples()[3] == std::complex<double>(1.9, -0.3));
}

TEST_CASE("truth column is optional") {
  const auto f = parse_trace_csv(
      "t,ant1_re,ant1_im,ant2_re,ant2_im,d_truth\n"
      "0,1,0,2,0,0.5\n"
      "0.001,1,0,2,0,0.51\n");
  REQUIRE(f.d_truth);
  CHECK((*f.d_truth)[1] == 0.51);
}

TEST_CASE("text in a numeric column names its line") {
  std::string text = kFourRows;
  text += "0.004,1,0,2,0\n0.005,1,abc,2,0\n";  // line 7
  const std::string msg = line_error(text);
  CHECK(msg.find("line 7") != std::string::npos);
  try {
    parse_trace_csv(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
  }
}

TEST_CASE("malformed files") {
  CHECK(line_error("").find("line 1") != std::string::npos);
  CHECK(line_error("time,a,b,c,d\n0,1,0,1,0\n").find("line 1") != std::string::npos);
  CHECK(line_error("t,ant1_re,ant1_im,ant2_re,ant2_im\n0,1,0,1\n").find("line 2") != std::string::npos);
  CHECK(line_error("t,ant1_re,ant1_im,ant2_re,ant2_im\n0,1,0,1,0,9\n").find("line 2") != std::string::npos);
  CHECK(line_error("t,ant1_re,ant1_im,ant2_re,ant2_im\n0,1,0,1,0\n\n0.001,1,0,1,0\n").find("line 3") !=
        std::string::npos);
  CHECK(line_error("t,ant1_re,ant1_im,ant2_re,ant2_im\n0,1,0,1,nan\n").find("line 2") != std::string::npos);
  CHECK_NOTHROW(parse_trace_csv(std::string(kFourRows) + "\n\n"));
}

TEST_CASE("timestamps must increase on a uniform grid") {
  try {
    parse_trace_csv("t,ant1_re,ant1_im,ant2_re,ant2_im\n0,1,0,1,0\n0.002,1,0,1,0\n0.001,1,0,1,0\n");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
  CHECK_THROWS_AS(parse_trace_csv("t,ant1_re,ant1_im,ant2_re,ant2_im\n0,1,0,1,0\n0.001,1,0,1,0\n0.0025,1,0,1,0\n"
                                  "0.003,1,0,1,0\n"),
                  Error);
  CHECK_NOTHROW(parse_trace_csv("t,ant1_re,ant1_im,ant2_re,ant2_im\n0,1,0,1,0\n0.001,1,0,1,0\n0.00205,1,0,1,0\n"
                                "0.003,1,0,1,0\n"));
}

TEST_CASE("emit then ingest is bit-exact") {
  MultipathScene<double> s;
  s.static_1 = {0.3, 1.0 / 7};
  s.static_2 = {1.0, -1.0 / 3};
  s.dyn_amp_1 = 0.9;
  s.dyn_amp_2 = 0.45;
  s.path_delta_m = 0.017;
  s.trajectory = [](double t) { return 0.02 * t + 1e-3 / 3; };
  const Vector<double> t = uniform_timestamps(1000.0, 3000, 0.123);
  auto [h1, h2] = synthesize_ideal(s, t);
  h1 = add_complex_noise(h1, 20.0, 1);
  Vector<double> truth(t.size());
  for (Index i = 0; i < t.size(); ++i) truth[i] = s.trajectory(t[i]);
  const TraceFile original{h1, h2, truth};

  const std::string text = format_trace_csv(original);
  const TraceFile back = parse_trace_csv(text);
  CHECK(back.antenna1 == original.antenna1);
  CHECK(back.antenna2 == original.antenna2);
  REQUIRE(back.d_truth);
  CHECK(*back.d_truth == truth);
  CHECK(format_trace_csv(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "subwave_trace_roundtrip.csv";
  write_trace_csv(path.string(), original);
  CHECK(read_trace_csv(path.string()).antenna1 == original.antenna1);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_trace_csv("/nonexistent/trace.csv"), Error);
  CHECK_THROWS_AS(write_trace_csv("/nonexistent/dir/trace.csv", original), Error);
}
