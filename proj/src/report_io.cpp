// Copyright 2026 The entangle-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "entangle/report_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "entangle/errors.hpp"

namespace entangle {

OpticalBench bench_from_json(const std::string &text, const OpticalBench &base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw InvalidArgument(std::string("bench config: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("bench config must be a JSON object");

  OpticalBench bench = base;
  for (const auto &[key, value] : doc.items()) {
    auto number = [&]() {
      if (!value.is_number()) throw InvalidArgument(fmt::format("bench config: {} must be a number", key));
      return value.get<double>();
    };
    if (key == "d_plate_a_m") {
      bench.d_plate_a_m = number();
    } else if (key == "d_prism_a_m") {
      bench.d_prism_a_m = number();
    } else if (key == "d_prism_b_m") {
      bench.d_prism_b_m = number();
    } else if (key == "alpha_deg") {
      bench.alpha = AnalyzerSetting::from_degrees(number());
    } else if (key == "beta_deg") {
      bench.beta = AnalyzerSetting::from_degrees(number());
    } else if (key == "plate_angle_deg") {
      bench.plate_angle = degrees_to_radians(number());
    } else if (key == "plate_present") {
      if (!value.is_boolean()) throw InvalidArgument("bench config: plate_present must be a boolean");
      bench.plate_present = value.get<bool>();
    } else {
      throw InvalidArgument(fmt::format("bench config: unknown key '{}'", key));
    }
  }
  bench.validate();
  return bench;
}

OpticalBench load_bench_file(const std::string &path, const OpticalBench &base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open bench config '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return bench_from_json(buf.str(), base);
}

std::string bench_to_json(const OpticalBench &bench) {
  return fmt::format(
      "{{\"d_plate_a_m\": {:.17g}, \"d_prism_a_m\": {:.17g}, \"d_prism_b_m\": {:.17g}, "
      "\"alpha_deg\": {:.17g}, \"beta_deg\": {:.17g}, \"plate_present\": {}, \"plate_angle_deg\": {:.17g}}}",
      bench.d_plate_a_m, bench.d_prism_a_m, bench.d_prism_b_m, bench.alpha.degrees(),
      bench.beta.degrees(), bench.plate_present, radians_to_degrees(bench.plate_angle));
}

}  // namespace entangle
