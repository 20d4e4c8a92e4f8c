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

#include "truckgap/event_screening.hpp"

#include "truckgap/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace truckgap
{
namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kSampleTolerance = 0.05;  // half of the 10 Hz period

}  // namespace

LaneChangeDetection detect_lane_change(const ChannelSeries & ch, std::span<const double> lane_width)
{
  ch.validate();
  const std::size_t n = ch.size();
  if (lane_width.size() != n) {
    throw Error(ErrorCode::length_mismatch, "detect_lane_change: lane width series length differs");
  }

  LaneChangeDetection out;
  bool armed = true;
  for (std::size_t i = 1; i < n; ++i) {
    const double half_width = 0.5 * lane_width[i];
    if (!armed) {
      // Re-arm only once the truck is well inside a lane again.
      if (std::abs(ch.lane_offset[i]) < half_width - kJumpHysteresis) armed = true;
      continue;
    }
    const double jump = ch.lane_offset[i] - ch.lane_offset[i - 1];
    if (!(std::abs(jump) > half_width)) continue;

    armed = false;
    const double t_lc = ch.t[i];
    std::optional<double> t_start, t_end;
    for (std::size_t j = i; j-- > 0;) {
      if (ch.t[j] < t_lc - kBoundarySearch) break;
      if (std::abs(ch.lane_offset[j]) <= kCenterTolerance) {
        t_start = ch.t[j];
        break;
      }
    }
    for (std::size_t j = i; j < n; ++j) {
      if (ch.t[j] > t_lc + kBoundarySearch) break;
      if (std::abs(ch.lane_offset[j]) <= kCenterTolerance) {
        t_end = ch.t[j];
        break;
      }
    }
    if (t_start && t_end) {
      out.events.push_back(
        {*t_start, t_lc, *t_end, jump < 0.0 ? Direction::right : Direction::left});
    } else {
      out.rejected_jumps.push_back(t_lc);
    }
  }
  return out;
}

double solar_zenith(double lat_deg, double lon_deg, UtcTime utc)
{
  using namespace std::chrono;
  const auto day = floor<days>(utc);
  const year_month_day ymd{day};
  const int day_of_year = (day - sys_days{ymd.year() / January / 1}).count() + 1;
  const double days_in_year = ymd.year().is_leap() ? 366.0 : 365.0;
  const double seconds = duration<double>(utc - day).count();
  const double hour = seconds / 3600.0;

  const double g = 2.0 * std::numbers::pi / days_in_year * (day_of_year - 1 + (hour - 12.0) / 24.0);
  const double eqtime = 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                                  0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
  const double decl = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                      0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                      0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);

  const double true_solar_minutes = seconds / 60.0 + eqtime + 4.0 * lon_deg;
  const double hour_angle = (true_solar_minutes / 4.0 - 180.0) * kDeg;
  const double lat = lat_deg * kDeg;
  const double cos_zenith =
    std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
  return std::acos(std::clamp(cos_zenith, -1.0, 1.0)) / kDeg;
}

double haversine_distance(const GeoPoint & a, const GeoPoint & b)
{
  const double dlat = (b.lat - a.lat) * kDeg;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * std::sin(dlon / 2) *
                     std::sin(dlon / 2);
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(s)));
}

bool ramp_proximity(std::span<const GeoPoint> track, const RampDatabase & db)
{
  if (track.empty()) {
    throw Error(ErrorCode::empty_input, "ramp_proximity: empty track");
  }
  if (db.points.empty()) {
    spdlog::debug("ramp database is empty; classifying event as non-ramp");
    return false;
  }
  for (const auto & p : track) {
    for (const auto & ramp : db.points) {
      if (haversine_distance(p, ramp) <= kRampRadius) return true;
    }
  }
  return false;
}

double heading_span(std::span<const double> heading_deg)
{
  if (heading_deg.empty()) return 0.0;
  double unwrapped = heading_deg[0];
  double lo = unwrapped, hi = unwrapped;
  for (std::size_t i = 1; i < heading_deg.size(); ++i) {
    double d = std::fmod(heading_deg[i] - heading_deg[i - 1], 360.0);
    if (d > 180.0) d -= 360.0;
    if (d <= -180.0) d += 360.0;
    unwrapped += d;
    lo = std::min(lo, unwrapped);
    hi = std::max(hi, unwrapped);
  }
  return hi - lo;
}

ScreeningResult screen_event(const LaneChangeEvent & event, const RampDatabase & db)
{
  if (!event.t_lc) {
    throw Error(ErrorCode::malformed_event, "event " + event.event_id + " has no lane-change time");
  }
  const ChannelSeries & ch = event.channels;
  ch.validate();

  ScreeningResult res;
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch.t[i] >= event.t_start - kSampleTolerance && ch.t[i] <= event.t_end + kSampleTolerance) {
      window.push_back(i);
    }
  }
  bool covered = !window.empty() && ch.t[window.front()] - event.t_start <= kMaxChannelGap &&
                 event.t_end - ch.t[window.back()] <= kMaxChannelGap;
  for (std::size_t k = 1; covered && k < window.size(); ++k) {
    if (ch.t[window[k]] - ch.t[window[k - 1]] > kMaxChannelGap) covered = false;
  }
  if (!covered) {
    res.determinate = false;
    res.note = "channel gap inside the event window";
    return res;
  }

  double min_speed = ch.speed[window.front()];
  std::vector<double> headings;
  headings.reserve(window.size());
  for (std::size_t i : window) {
    min_speed = std::min(min_speed, ch.speed[i]);
    headings.push_back(ch.heading[i]);
  }
  res.highway = min_speed >= kMinHighwaySpeed;
  res.straight = heading_span(headings) <= kMaxHeadingSpan;

  const std::size_t i_lc = ch.nearest_index(*event.t_lc);
  const auto utc_lc =
    ch.utc_anchor + std::chrono::milliseconds(std::llround(*event.t_lc * 1000.0));
  res.daytime = solar_zenith(ch.lat[i_lc], ch.lon[i_lc], utc_lc) <= kCivilDuskZenith;

  std::vector<GeoPoint> track;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch.t[i] >= event.t_start - kRampLead && ch.t[i] <= event.t_end + kRampLag) {
      track.push_back({ch.lat[i], ch.lon[i]});
    }
  }
  res.ramp_region = ramp_proximity(track, db);
  return res;
}

std::optional<double> sv_speed_change(const ChannelSeries & ch, double t_lc)
{
  if (ch.size() == 0) return std::nullopt;
  const double t0 = t_lc - kSpeedChangeWindow;
  if (t0 < ch.t.front() - kSampleTolerance || t_lc > ch.t.back() + kSampleTolerance) {
    return std::nullopt;
  }
  return ch.speed[ch.nearest_index(t_lc)] - ch.speed[ch.nearest_index(t0)];
}

std::vector<LaneChangeEvent> filter_by_marker_pattern(
  std::span<const LaneChangeEvent> events, const std::set<std::string> & allowed)
{
  std::vector<LaneChangeEvent> out;
  for (const auto & ev : events) {
    const bool ramp = ev.screening && ev.screening->ramp_region;
    if (!ramp || (ev.marker_pattern && allowed.count(*ev.marker_pattern))) {
      out.push_back(ev);
    }
  }
  return out;
}

const std::set<std::string> & default_marker_patterns()
{
  static const std::set<std::string> patterns = {
    "solid-dashed-solid", "dashed-dashed-solid", "solid-dashed-dashed", "dashed-dashed-dashed"};
  return patterns;
}

}  // namespace truckgap
