// Copyright 2026 The truckgap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "truckgap/gap_estimator.hpp"

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace truckgap
{

enum class Direction { left, right };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

enum class Subset { non_ramp, ramp };

std::string_view to_string(Subset s);
std::optional<Subset> parse_subset(std::string_view s);

using UtcTime = std::chrono::sys_time<std::chrono::milliseconds>;

/// Vehicle data channels sampled on the 10 Hz acquisition grid. Times are
/// seconds relative to the event start; `utc_anchor` is the absolute time of
/// t = 0. lane_offset is the truck center's signed offset from the current
/// lane center, positive to the right.
struct ChannelSeries
{
  std::vector<double> t;
  std::vector<double> speed;        // m/s
  std::vector<double> heading;      // degrees
  std::vector<double> lane_offset;  // m
  std::vector<double> lat;          // degrees
  std::vector<double> lon;          // degrees
  std::vector<double> lane_width;   // m, optional (empty if the tracker width is absent)
  UtcTime utc_anchor{};

  std::size_t size() const { return t.size(); }
  bool has_lane_width() const { return !lane_width.empty(); }

  /// Index of the sample nearest to time `at`; requires a non-empty series.
  std::size_t nearest_index(double at) const;

  /// Absolute time of sample i.
  UtcTime utc_at(std::size_t i) const;

  /// Throws Error(schema) on misaligned lengths or non-increasing time.
  void validate() const;
};

struct ScreeningResult
{
  bool highway = false;
  bool straight = false;
  bool daytime = false;
  bool ramp_region = false;
  // False when the channels do not cover the window; flags are then unset.
  bool determinate = true;
  std::string note;

  bool passes() const { return determinate && highway && straight && daytime; }
  Subset subset() const { return ramp_region ? Subset::ramp : Subset::non_ramp; }

  friend bool operator==(const ScreeningResult &, const ScreeningResult &) = default;
};

struct LaneChangeEvent
{
  std::string event_id;
  Direction direction = Direction::left;
  double t_start = 0.0;
  std::optional<double> t_lc;
  double t_end = 0.0;
  std::vector<FrameAnnotation> frames;  // sorted by t
  double trailer_length = 0.0;          // L, camera to rear of trailer (m)
  double lane_width = 0.0;              // W fallback when channels carry no width
  ChannelSeries channels;
  std::optional<std::string> scenario_label;
  std::optional<std::string> marker_pattern;
  std::optional<ScreeningResult> screening;
};

}  // namespace truckgap
