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

#include "truckgap/event.hpp"

#include "truckgap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace truckgap
{

std::string_view to_string(Direction d)
{
  return d == Direction::left ? "left" : "right";
}

std::optional<Direction> parse_direction(std::string_view s)
{
  if (s == "left") return Direction::left;
  if (s == "right") return Direction::right;
  return std::nullopt;
}

std::string_view to_string(Subset s)
{
  return s == Subset::ramp ? "ramp" : "non-ramp";
}

std::optional<Subset> parse_subset(std::string_view s)
{
  if (s == "ramp") return Subset::ramp;
  if (s == "non-ramp") return Subset::non_ramp;
  return std::nullopt;
}

std::size_t ChannelSeries::nearest_index(double at) const
{
  if (t.empty()) {
    throw Error(ErrorCode::empty_input, "channel series is empty");
  }
  const auto it = std::lower_bound(t.begin(), t.end(), at);
  if (it == t.begin()) return 0;
  if (it == t.end()) return t.size() - 1;
  const auto hi = static_cast<std::size_t>(it - t.begin());
  // Ties resolve to the earlier sample.
  return (at - t[hi - 1] <= t[hi] - at) ? hi - 1 : hi;
}

UtcTime ChannelSeries::utc_at(std::size_t i) const
{
  const auto offset = std::chrono::milliseconds(std::llround(t.at(i) * 1000.0));
  return utc_anchor + offset;
}

void ChannelSeries::validate() const
{
  const std::size_t n = t.size();
  if (speed.size() != n || heading.size() != n || lane_offset.size() != n || lat.size() != n ||
      lon.size() != n || (!lane_width.empty() && lane_width.size() != n)) {
    throw Error(ErrorCode::schema, "channel columns have different lengths");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t[i] > t[i - 1])) {
      throw Error(ErrorCode::schema, "channel timestamps are not strictly increasing");
    }
  }
}

}  // namespace truckgap
