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
#include <string_view>

namespace truckgap
{

struct WarningThresholds
{
  double ttc_max = 4.0;           // s
  double d_req_min = 0.8;         // m/s^2
  double right_range_min = 12.7;  // m, right lane changes only

  /// Throws Error(invalid_argument) unless every threshold is positive.
  void validate() const;
};

struct WarningFlags
{
  bool ttc = false;
  bool d_req = false;
  bool range = false;

  bool any() const { return ttc || d_req || range; }

  friend bool operator==(const WarningFlags &, const WarningFlags &) = default;
};

struct ConflictAssessment
{
  std::optional<double> ttc;  // s, signed; empty when the range rate is zero
  double d_req = 0.0;         // m/s^2
  bool closing = false;
};

inline constexpr double kMinRangeRate = 1e-9;

/// TTC = -R / Rdot. Negative values mean the vehicles are separating.
std::optional<double> time_to_collision(double range, double range_rate);

/// Constant deceleration the POV needs to avoid the SV: Rdot^2 / (2R) when
/// closing, zero otherwise. Throws Error(domain) for R <= 0.
double required_deceleration(double range, double range_rate);

ConflictAssessment assess_conflict(double range, double range_rate);

WarningFlags warning_decision(
  Direction direction, double range, double range_rate, const WarningThresholds & th = {});

}  // namespace truckgap
