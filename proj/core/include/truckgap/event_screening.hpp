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

#include "truckgap/event.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace truckgap
{

struct GeoPoint
{
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  friend bool operator==(const GeoPoint &, const GeoPoint &) = default;
};

/// Ramp / through-lane intersection points.
struct RampDatabase
{
  std::vector<GeoPoint> points;
};

inline constexpr double kEarthRadius = 6371000.0;  // m
inline constexpr double kRampRadius = 500.0;       // m
inline constexpr double kMinHighwaySpeed = 24.6;   // m/s (55 mph)
inline constexpr double kMaxHeadingSpan = 5.0;     // degrees
inline constexpr double kCivilDuskZenith = 96.0;   // degrees
inline constexpr double kMaxChannelGap = 0.5;      // s
inline constexpr double kCenterTolerance = 0.1;    // m, lane-change boundary
inline constexpr double kJumpHysteresis = 0.3;     // m
inline constexpr double kBoundarySearch = 10.0;    // s
inline constexpr double kRampLead = 2.0;           // s before t_start
inline constexpr double kRampLag = 5.0;            // s after t_end
inline constexpr double kSpeedChangeWindow = 5.0;  // s

struct DetectedLaneChange
{
  double t_start = 0.0;
  double t_lc = 0.0;
  double t_end = 0.0;
  Direction direction = Direction::left;

  friend bool operator==(const DetectedLaneChange &, const DetectedLaneChange &) = default;
};

struct LaneChangeDetection
{
  std::vector<DetectedLaneChange> events;
  std::vector<double> rejected_jumps;  // t of jumps without both boundaries
};

/// Finds tracker re-anchor jumps in lane_offset (|delta| > half the local
/// lane width) and brackets each with the last/first samples within
/// kCenterTolerance of the old/new lane center. A jump to negative offset
/// means the truck moved right.
LaneChangeDetection detect_lane_change(const ChannelSeries & ch, std::span<const double> lane_width);

/// Low-precision solar zenith angle in degrees (fractional-year series for
/// declination and equation of time; error well under 0.5 degrees).
double solar_zenith(double lat_deg, double lon_deg, UtcTime utc);

double haversine_distance(const GeoPoint & a, const GeoPoint & b);

/// True iff any track point lies within kRampRadius of any ramp point.
bool ramp_proximity(std::span<const GeoPoint> track, const RampDatabase & db);

/// Highway speed, straight road, daytime, and ramp-region classification.
/// Requires event.t_lc.
ScreeningResult screen_event(const LaneChangeEvent & event, const RampDatabase & db);

/// Heading span after unwrapping the 0/360 seam.
double heading_span(std::span<const double> heading_deg);

/// speed(t_lc) - speed(t_lc - 5 s) by nearest-sample lookup; empty when the
/// channels do not cover the window.
std::optional<double> sv_speed_change(const ChannelSeries & ch, double t_lc);

/// Ramp events are kept only for the listed marker patterns (exact match).
std::vector<LaneChangeEvent> filter_by_marker_pattern(
  std::span<const LaneChangeEvent> events, const std::set<std::string> & allowed);

/// The four left-to-right marker combinations used for ramp events.
const std::set<std::string> & default_marker_patterns();

}  // namespace truckgap
