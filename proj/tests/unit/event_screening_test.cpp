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

#include "truckgap/bundle_io.hpp"
#include "truckgap/errors.hpp"
#include "truckgap/event_screening.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace truckgap
{
namespace
{

constexpr GeoPoint kAnnArbor{42.28, -83.74};

// 10 Hz channels over [0, duration] with constant speed, heading and
// position.
ChannelSeries flat_channels(double duration, double speed = 26.0, double heading = 90.0)
{
  ChannelSeries ch;
  const int n = static_cast<int>(std::lround(duration * 10.0)) + 1;
  for (int i = 0; i < n; ++i) {
    ch.t.push_back(i / 10.0);
    ch.speed.push_back(speed);
    ch.heading.push_back(heading);
    ch.lane_offset.push_back(0.0);
    ch.lat.push_back(kAnnArbor.lat);
    ch.lon.push_back(kAnnArbor.lon);
  }
  ch.utc_anchor = parse_utc("2024-06-15T17:00:00Z");
  return ch;
}

// Offset ramps 0 -> +1.8 over [start, start + 3), re-anchors to -1.8 at
// start + 3 and returns to 0 over 3 s (a rightward change for sign = +1).
void add_lane_change(ChannelSeries & ch, double start, double sign)
{
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const double t = ch.t[i];
    if (t >= start && t < start + 3.0) ch.lane_offset[i] = sign * 0.6 * (t - start);
    if (t >= start + 3.0 && t < start + 6.0) ch.lane_offset[i] = sign * (-1.8 + 0.6 * (t - start - 3.0));
  }
}

ScreeningResult flags(bool highway, bool straight, bool daytime, bool ramp)
{
  ScreeningResult r;
  r.highway = highway;
  r.straight = straight;
  r.daytime = daytime;
  r.ramp_region = ramp;
  return r;
}

LaneChangeEvent screening_event(ChannelSeries ch)
{
  LaneChangeEvent ev;
  ev.event_id = "screen";
  ev.t_start = 5.0;
  ev.t_lc = 8.0;
  ev.t_end = 11.0;
  ev.channels = std::move(ch);
  return ev;
}

TEST(DetectLaneChange, ConstructedRightwardTrace)
{
  ChannelSeries ch = flat_channels(20);
  add_lane_change(ch, 5.0, +1.0);
  const std::vector<double> width(ch.size(), 3.6);
  const auto d = detect_lane_change(ch, width);
  ASSERT_EQ(d.events.size(), 1u);
  EXPECT_EQ(d.events[0].direction, Direction::right);
  EXPECT_DOUBLE_EQ(d.events[0].t_lc, 8.0);
  EXPECT_DOUBLE_EQ(d.events[0].t_start, 5.1);
  EXPECT_DOUBLE_EQ(d.events[0].t_end, 10.9);
  EXPECT_TRUE(d.rejected_jumps.empty());
}

TEST(DetectLaneChange, LeftwardTraceAndNoEvents)
{
  ChannelSeries ch = flat_channels(20);
  const std::vector<double> width(ch.size(), 3.6);
  EXPECT_TRUE(detect_lane_change(ch, width).events.empty());
  add_lane_change(ch, 5.0, -1.0);
  const auto d = detect_lane_change(ch, width);
  ASSERT_EQ(d.events.size(), 1u);
  EXPECT_EQ(d.events[0].direction, Direction::left);
}

TEST(DetectLaneChange, TwoJumpsThirtySecondsApart)
{
  ChannelSeries ch = flat_channels(60);
  add_lane_change(ch, 5.0, +1.0);
  add_lane_change(ch, 35.0, -1.0);
  const std::vector<double> width(ch.size(), 3.6);
  const auto d = detect_lane_change(ch, width);
  ASSERT_EQ(d.events.size(), 2u);
  EXPECT_DOUBLE_EQ(d.events[0].t_lc, 8.0);
  EXPECT_DOUBLE_EQ(d.events[1].t_lc, 38.0);
  EXPECT_EQ(d.events[1].direction, Direction::left);
}

TEST(DetectLaneChange, PartialManeuverIsRejected)
{
  ChannelSeries ch = flat_channels(20);
  add_lane_change(ch, 5.0, +1.0);
  // The truck never settles in the new lane.
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch.t[i] >= 8.0) ch.lane_offset[i] = -1.0;
  }
  const std::vector<double> width(ch.size(), 3.6);
  const auto d = detect_lane_change(ch, width);
  EXPECT_TRUE(d.events.empty());
  ASSERT_EQ(d.rejected_jumps.size(), 1u);
  EXPECT_DOUBLE_EQ(d.rejected_jumps[0], 8.0);
}

TEST(DetectLaneChange, TranslationInvariance)
{
  ChannelSeries ch = flat_channels(60);
  add_lane_change(ch, 5.0, +1.0);
  add_lane_change(ch, 35.0, -1.0);
  const std::vector<double> width(ch.size(), 3.6);
  const auto base = detect_lane_change(ch, width);
  for (double tau : {-3.25, 17.0, 1234.5}) {
    ChannelSeries shifted = ch;
    for (auto & t : shifted.t) t += tau;
    const auto moved = detect_lane_change(shifted, width);
    ASSERT_EQ(moved.events.size(), base.events.size());
    for (std::size_t k = 0; k < base.events.size(); ++k) {
      // Outputs are sample times, so the shift carries through exactly.
      const auto idx = [&](double t) { return ch.nearest_index(t); };
      EXPECT_EQ(moved.events[k].t_lc, shifted.t[idx(base.events[k].t_lc)]);
      EXPECT_EQ(moved.events[k].t_start, shifted.t[idx(base.events[k].t_start)]);
      EXPECT_EQ(moved.events[k].t_end, shifted.t[idx(base.events[k].t_end)]);
      EXPECT_EQ(moved.events[k].direction, base.events[k].direction);
    }
  }
}

TEST(DetectLaneChange, NoiseBelowHalfWidthIsIgnored)
{
  ChannelSeries ch = flat_channels(30);
  testing::Rng rng(4);
  for (auto & o : ch.lane_offset) o = rng.uniform(-0.8, 0.8);
  const std::vector<double> width(ch.size(), 3.6);
  EXPECT_TRUE(detect_lane_change(ch, width).events.empty());
  EXPECT_THROW(detect_lane_change(ch, std::vector<double>(3, 3.6)), Error);
}

TEST(SolarZenith, EquatorAtEquinoxNoon)
{
  double best = 180.0;
  const UtcTime day = parse_utc("2024-03-20T10:00:00Z");
  for (int minute = 0; minute <= 240; ++minute) {
    best = std::min(best, solar_zenith(0.0, 0.0, day + std::chrono::minutes(minute)));
  }
  EXPECT_LT(best, 1.0);
}

TEST(SolarZenith, MatchesReferenceAlgorithm)
{
  // Frozen from tests/oracles/solar_oracle.py (Julian-century algorithm).
  struct Case
  {
    double lat, lon;
    const char * utc;
    double zenith;
  };
  const Case cases[] = {
    {0.0, 0.0, "2000-01-01T12:00:00Z", 23.0465},
    {42.28, -83.74, "2024-06-15T04:00:00Z", 110.78},
    {42.28, -83.74, "2024-06-15T17:30:00Z", 18.97},
    {42.28, -83.74, "2024-06-16T03:00:00Z", 105.17},
    {42.28, -83.74, "2024-06-16T01:41:20Z", 95.003},
    {42.28, -83.74, "2024-06-16T01:55:20Z", 97.003},
  };
  for (const auto & c : cases) {
    EXPECT_NEAR(solar_zenith(c.lat, c.lon, parse_utc(c.utc)), c.zenith, 0.5) << c.utc;
  }
  EXPECT_GT(solar_zenith(42.28, -83.74, parse_utc("2024-06-15T04:00:00Z")), kCivilDuskZenith);
}

TEST(Haversine, SymmetryIdentityAndMeridianArc)
{
  testing::Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a{rng.uniform(-80, 80), rng.uniform(-180, 180)};
    const GeoPoint b{rng.uniform(-80, 80), rng.uniform(-180, 180)};
    EXPECT_EQ(haversine_distance(a, a), 0.0);
    EXPECT_NEAR(haversine_distance(a, b), haversine_distance(b, a), 1e-6);
    const double dlat = rng.uniform(-0.05, 0.05);
    const GeoPoint c{std::clamp(a.lat + dlat, -89.0, 89.0), a.lon};
    EXPECT_NEAR(haversine_distance(a, c), testing::meridian_arc_m(c.lat - a.lat), 1e-6);
  }
}

TEST(RampProximity, FiveHundredMeterBoundary)
{
  const std::vector<GeoPoint> track = {kAnnArbor};
  EXPECT_TRUE(ramp_proximity(track, RampDatabase{{kAnnArbor}}));
  const GeoPoint near{kAnnArbor.lat + 499.0 / 111195.0, kAnnArbor.lon};
  const GeoPoint far{kAnnArbor.lat + 501.0 / 111195.0, kAnnArbor.lon};
  EXPECT_NEAR(haversine_distance(kAnnArbor, near), 499.0, 0.01);
  EXPECT_TRUE(ramp_proximity(track, RampDatabase{{near}}));
  EXPECT_FALSE(ramp_proximity(track, RampDatabase{{far}}));
  EXPECT_FALSE(ramp_proximity(track, RampDatabase{}));
  EXPECT_THROW(ramp_proximity(std::vector<GeoPoint>{}, RampDatabase{{near}}), Error);
}

TEST(HeadingSpan, WrapAndOffsetInvariance)
{
  EXPECT_NEAR(heading_span(std::vector<double>{358.0, 359.5, 0.5, 1.0}), 3.0, 1e-12);
  testing::Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> h;
    double base = rng.uniform(0, 360);
    for (int k = 0; k < 50; ++k) h.push_back(std::fmod(base + rng.uniform(-4, 4) + 360.0, 360.0));
    const double span = heading_span(h);
    for (double off : {90.0, 180.0, 271.0}) {
      std::vector<double> g = h;
      for (auto & v : g) v = std::fmod(v + off, 360.0);
      EXPECT_NEAR(heading_span(g), span, 1e-9);
    }
  }
}

TEST(ScreenEvent, PassingFixtureAndToggles)
{
  ChannelSeries ch = flat_channels(20);
  for (std::size_t i = 0; i < ch.size(); ++i) ch.heading[i] = 90.0 + 2.0 * ch.t[i] / 20.0;
  auto ev = screening_event(ch);
  ScreeningResult r = screen_event(ev, RampDatabase{});
  EXPECT_TRUE(r.passes());
  EXPECT_EQ(r.subset(), Subset::non_ramp);

  auto slow = ev;
  slow.channels.speed[slow.channels.nearest_index(9.0)] = 20.0;
  EXPECT_FALSE(screen_event(slow, RampDatabase{}).highway);

  auto night = ev;
  night.channels.utc_anchor = parse_utc("2024-06-16T03:00:00Z") - std::chrono::seconds(8);
  r = screen_event(night, RampDatabase{});
  EXPECT_FALSE(r.daytime);
  EXPECT_FALSE(r.passes());
}

TEST(ScreenEvent, MatrixOfCriterionBoundaries)
{
  const GeoPoint ramp_near{kAnnArbor.lat + 499.0 / 111195.0, kAnnArbor.lon};
  const GeoPoint ramp_far{kAnnArbor.lat + 501.0 / 111195.0, kAnnArbor.lon};
  // t_lc = 8 s maps onto the listed UTC instants.
  const UtcTime dusk_95 = parse_utc("2024-06-16T01:41:20Z") - std::chrono::seconds(8);
  const UtcTime dusk_97 = parse_utc("2024-06-16T01:55:20Z") - std::chrono::seconds(8);

  struct Fixture
  {
    double min_speed, heading_span;
    UtcTime anchor;
    GeoPoint ramp;
    ScreeningResult truth;
  };
  const Fixture fixtures[] = {
    {24.7, 4.9, dusk_95, ramp_far, flags(true, true, true, false)},
    {24.5, 4.9, dusk_95, ramp_far, flags(false, true, true, false)},
    {24.7, 5.1, dusk_95, ramp_far, flags(true, false, true, false)},
    {24.7, 4.9, dusk_97, ramp_far, flags(true, true, false, false)},
    {24.7, 4.9, dusk_95, ramp_near, flags(true, true, true, true)},
    {24.5, 5.1, dusk_95, ramp_near, flags(false, false, true, true)},
    {24.7, 5.1, dusk_97, ramp_far, flags(true, false, false, false)},
    {24.5, 4.9, dusk_97, ramp_near, flags(false, true, false, true)},
  };
  for (const auto & f : fixtures) {
    ChannelSeries ch = flat_channels(20, 27.0);
    for (std::size_t i = 0; i < ch.size(); ++i) {
      ch.heading[i] = 358.0 + f.heading_span * (ch.t[i] - 5.0) / 6.0;  // crosses north
      if (ch.heading[i] >= 360.0) ch.heading[i] -= 360.0;
    }
    ch.speed[ch.nearest_index(9.5)] = f.min_speed;
    ch.utc_anchor = f.anchor;
    ScreeningResult r = screen_event(screening_event(ch), RampDatabase{{f.ramp}});
    r.note.clear();
    EXPECT_EQ(r, f.truth) << f.min_speed << " " << f.heading_span;
  }
}

TEST(ScreenEvent, ChannelGapIsIndeterminate)
{
  ChannelSeries ch = flat_channels(20);
  ChannelSeries gapped;
  gapped.utc_anchor = ch.utc_anchor;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch.t[i] > 8.9 && ch.t[i] < 9.55) continue;
    gapped.t.push_back(ch.t[i]);
    gapped.speed.push_back(ch.speed[i]);
    gapped.heading.push_back(ch.heading[i]);
    gapped.lane_offset.push_back(0.0);
    gapped.lat.push_back(ch.lat[i]);
    gapped.lon.push_back(ch.lon[i]);
  }
  const ScreeningResult r = screen_event(screening_event(gapped), RampDatabase{});
  EXPECT_FALSE(r.determinate);
  EXPECT_FALSE(r.passes());
  EXPECT_EQ(r, screen_event(screening_event(gapped), RampDatabase{}));
}

TEST(SvSpeedChange, Examples)
{
  ChannelSeries ch = flat_channels(20);
  EXPECT_EQ(*sv_speed_change(ch, 12.0), 0.0);
  for (std::size_t i = 0; i < ch.size(); ++i) ch.speed[i] = 20.0 + 0.4 * ch.t[i];
  EXPECT_NEAR(*sv_speed_change(ch, 12.0), 2.0, 1e-12);
  for (std::size_t i = 0; i < ch.size(); ++i) ch.speed[i] = 25.0 + 1.5 * std::sin(0.7 * ch.t[i]);
  EXPECT_EQ(*sv_speed_change(ch, 12.0), ch.speed[120] - ch.speed[70]);
  EXPECT_FALSE(sv_speed_change(ch, 3.0));
  EXPECT_FALSE(sv_speed_change(ch, 25.0));
}

TEST(MarkerPatterns, RampEventsFilteredByPattern)
{
  LaneChangeEvent ramp_ok, ramp_bad, plain;
  ramp_ok.screening = flags(true, true, true, true);
  ramp_ok.marker_pattern = "solid-dashed-solid";
  ramp_bad.screening = flags(true, true, true, true);
  ramp_bad.marker_pattern = "solid-solid-solid";
  plain.screening = flags(true, true, true, false);
  const std::vector<LaneChangeEvent> all = {ramp_ok, ramp_bad, plain};
  const auto kept = filter_by_marker_pattern(all, default_marker_patterns());
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].marker_pattern, ramp_ok.marker_pattern);
  EXPECT_EQ(default_marker_patterns().size(), 4u);
}

}  // namespace
}  // namespace truckgap
