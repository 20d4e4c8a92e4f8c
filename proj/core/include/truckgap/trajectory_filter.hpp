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

#include "truckgap/conflict_metrics.hpp"
#include "truckgap/event.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace truckgap
{

/// First-order fit R(t) = rate * t + intercept. The fit is solved in time
/// shifted by t_ref; value_at() evaluates in that frame for conditioning.
struct LineFit
{
  double rate = 0.0;       // a1, m/s
  double intercept = 0.0;  // a2, m at t = 0
  double t_ref = 0.0;      // s
  double level = 0.0;      // fitted value at t_ref, m
  std::size_t n = 0;
  double weighted_sse = 0.0;  // m^2

  double value_at(double t) const { return level + rate * (t - t_ref); }
};

/// w_i = R_min / R_i, so the closest (most accurate) estimate weighs 1.
std::vector<double> compute_weights(std::span<const double> ranges);

/// Minimizes sum w_i (R_i - a1 t_i - a2)^2 through the 2x2 normal equations.
LineFit weighted_line_fit(
  std::span<const double> times, std::span<const double> ranges, std::span<const double> weights);

inline constexpr double kMaxExtrapolation = 0.6;  // s

/// R(t_lc) = a1 * (t_lc - t_n) + R_fit(t_n). Throws Error(stale_frame) when
/// the gap is negative or longer than kMaxExtrapolation.
double extrapolate_to_lane_change(const LineFit & fit, double t_n, double t_lc);

inline constexpr std::size_t kMinConsecutiveFrames = 7;
inline constexpr double kLaneWidthWindow = 5.0;  // s before t_lc

/// Median of the tracker lane-width channel over the window preceding t_lc,
/// falling back to the event's nominal lane width.
double reference_lane_width(const LaneChangeEvent & event);

enum class GapOutcome {
  ok,
  discarded_insufficient_frames,
  discarded_stale_frame,
  overlap_at_lane_change,
};

std::string_view to_string(GapOutcome outcome);

struct GapResult
{
  std::string event_id;
  Direction direction = Direction::left;
  double range_lc = 0.0;    // m
  double range_rate = 0.0;  // m/s
  double delta_t = 0.0;     // s
  double t_n = 0.0;         // s
  std::size_t frames_used = 0;
  std::optional<double> ttc;    // s
  std::optional<double> d_req;  // m/s^2, empty when R(t_lc) <= 0
  WarningFlags warnings;
  LineFit fit;
  std::vector<RangeEstimate> estimates;  // chronological
};

struct GapProcessing
{
  GapOutcome outcome = GapOutcome::ok;
  std::size_t qualified_frames = 0;
  std::optional<GapResult> result;
};

/// Walks backward from the last frame at or before t_lc, stops at the first
/// unqualified frame, and fits the consecutive run. Runs shorter than
/// kMinConsecutiveFrames come back as a discarded outcome, not an exception.
GapProcessing process_event_gap(
  const LaneChangeEvent & event, const CameraIntrinsics & cam, double lane_width_m,
  double trailer_length_m, const WarningThresholds & thresholds = {});

}  // namespace truckgap
