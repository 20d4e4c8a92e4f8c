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

#include "truckgap/conflict_metrics.hpp"

#include "truckgap/errors.hpp"

#include <cmath>

namespace truckgap
{

void WarningThresholds::validate() const
{
  if (!(ttc_max > 0.0) || !(d_req_min > 0.0) || !(right_range_min > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "warning thresholds must be positive");
  }
}

std::optional<double> time_to_collision(double range, double range_rate)
{
  if (!std::isfinite(range) || !std::isfinite(range_rate)) {
    throw Error(ErrorCode::non_finite_input, "time_to_collision: non-finite input");
  }
  if (std::abs(range_rate) < kMinRangeRate) {
    return std::nullopt;
  }
  return -range / range_rate;
}

double required_deceleration(double range, double range_rate)
{
  if (!(range > 0.0)) {
    throw Error(ErrorCode::domain, "required deceleration is undefined for a non-positive range");
  }
  if (range_rate >= 0.0) {
    return 0.0;
  }
  return range_rate * range_rate / (2.0 * range);
}

ConflictAssessment assess_conflict(double range, double range_rate)
{
  return {time_to_collision(range, range_rate), required_deceleration(range, range_rate),
          range_rate < 0.0};
}

WarningFlags warning_decision(
  Direction direction, double range, double range_rate, const WarningThresholds & th)
{
  const ConflictAssessment c = assess_conflict(range, range_rate);
  WarningFlags flags;
  flags.ttc = c.ttc && *c.ttc > 0.0 && *c.ttc < th.ttc_max;
  flags.d_req = c.d_req > th.d_req_min;
  flags.range = direction == Direction::right && range < th.right_range_min;
  return flags;
}

}  // namespace truckgap
