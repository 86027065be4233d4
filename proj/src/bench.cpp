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

#include "entangle/bench.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "entangle/errors.hpp"

namespace entangle {

void OpticalBench::validate() const {
  const auto check = [](double d, const char *name) {
    if (!std::isfinite(d) || d < 0.0) {
      throw InvalidBench(fmt::format("{} must be a finite distance >= 0 (got {})", name, d));
    }
  };
  check(d_plate_a_m, "d_plate_a");
  check(d_prism_a_m, "d_prism_a");
  check(d_prism_b_m, "d_prism_b");
  if (!std::isfinite(plate_angle)) throw InvalidBench("plate angle must be finite");
  if (plate_present && d_plate_a_m > d_prism_a_m) {
    throw InvalidBench(fmt::format("plate at {} m lies behind the channel-a prism at {} m",
                                   d_plate_a_m, d_prism_a_m));
  }
}

std::string_view event_name(Event e) {
  switch (e) {
    case Event::PlateA: return "PlateA";
    case Event::DetectB: return "DetectB";
    case Event::DetectA: return "DetectA";
  }
  return "?";
}

int EventTimeline::position(Event e) const {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].event == e) return static_cast<int>(i);
  }
  return -1;
}

bool EventTimeline::precedes(Event first, Event second) const {
  const int p = position(first);
  const int q = position(second);
  return p >= 0 && q >= 0 && p < q;
}

bool EventTimeline::b_before_plate() const { return precedes(Event::DetectB, Event::PlateA); }

Channel EventTimeline::first_detection() const {
  return precedes(Event::DetectB, Event::DetectA) ? Channel::B : Channel::A;
}

EventTimeline build_timeline(const OpticalBench &bench) {
  bench.validate();
  EventTimeline t;
  if (bench.plate_present) t.events_.push_back({Event::PlateA, bench.d_plate_a_m / kSpeedOfLight});
  t.events_.push_back({Event::DetectB, bench.d_prism_b_m / kSpeedOfLight});
  t.events_.push_back({Event::DetectA, bench.d_prism_a_m / kSpeedOfLight});
  std::stable_sort(t.events_.begin(), t.events_.end(), [](const TimedEvent &l, const TimedEvent &r) {
    if (l.time_s != r.time_s) return l.time_s < r.time_s;
    return l.event < r.event;
  });
  return t;
}

Model parse_model(std::string_view name) {
  if (name == "qm") return Model::Qm;
  if (name == "lhv-sign") return Model::LhvSign;
  if (name == "naive") return Model::Naive;
  throw ModelNotFound(std::string(name));
}

std::string_view model_name(Model m) {
  switch (m) {
    case Model::Qm: return "qm";
    case Model::LhvSign: return "lhv-sign";
    case Model::Naive: return "naive";
  }
  return "?";
}

}  // namespace entangle
