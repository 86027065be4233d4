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

#pragma once

// Optical bench geometry and the lab-frame event timeline derived from it.
// Photons leave the crystal at t = 0 and travel at c, so each element's event
// time is its distance from the crystal divided by c.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "entangle/angles.hpp"
#include "entangle/quantum_core.hpp"

namespace entangle {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

struct OpticalBench {
  double d_plate_a_m = 0.5;
  double d_prism_a_m = 1.5;
  double d_prism_b_m = 1.0;
  AnalyzerSetting alpha;
  AnalyzerSetting beta;
  bool plate_present = true;
  double plate_angle = kQuarterPi;  // radians

  /// Throws InvalidBench when a distance is negative or non-finite, or the
  /// plate sits behind the channel-a prism.
  void validate() const;

  friend bool operator==(const OpticalBench &, const OpticalBench &) = default;
};

/// Enumerator order is the tie-break for simultaneous events.
enum class Event : std::uint8_t { PlateA, DetectB, DetectA };

std::string_view event_name(Event e);

struct TimedEvent {
  Event event;
  double time_s;
};

class EventTimeline {
 public:
  const std::vector<TimedEvent> &events() const { return events_; }
  /// Position of `e` in the ordering, or -1 when it is absent.
  int position(Event e) const;
  bool precedes(Event first, Event second) const;
  /// True iff the plate is installed and photon b is registered before photon a reaches it.
  bool b_before_plate() const;
  /// Channel registered first.
  Channel first_detection() const;

 private:
  friend EventTimeline build_timeline(const OpticalBench &bench);
  std::vector<TimedEvent> events_;
};

EventTimeline build_timeline(const OpticalBench &bench);

enum class Model : std::uint8_t { Qm, LhvSign, Naive };

/// Registry names: "qm", "lhv-sign", "naive". Throws ModelNotFound.
Model parse_model(std::string_view name);
std::string_view model_name(Model m);

}  // namespace entangle
