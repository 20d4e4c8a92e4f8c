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

#include "truckgap/pipeline.hpp"

#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace truckgap
{
namespace
{

EventBundle sim_bundle(const EventSpec & spec, double sigma = 0.0, std::uint64_t seed = 0)
{
  SyntheticScene scene;
  scene.pixel_noise_sigma = sigma;
  scene.seed = seed;
  scene.trailer_length = 0.0;
  return make_synthetic_bundle(synthesize_event(spec, scene), scene);
}

void drop_channel_samples(ChannelSeries & ch, double from, double to)
{
  ChannelSeries out;
  out.utc_anchor = ch.utc_anchor;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch.t[i] > from && ch.t[i] < to) continue;
    out.t.push_back(ch.t[i]);
    out.speed.push_back(ch.speed[i]);
    out.heading.push_back(ch.heading[i]);
    out.lane_offset.push_back(ch.lane_offset[i]);
    out.lat.push_back(ch.lat[i]);
    out.lon.push_back(ch.lon[i]);
    if (ch.has_lane_width()) out.lane_width.push_back(ch.lane_width[i]);
  }
  ch = out;
}

const CameraIntrinsics kCam = default_synthetic_camera();

TEST(Pipeline, NoiselessEventRow)
{
  EventSpec spec;
  spec.event_id = "ev-a";
  const auto b = sim_bundle(spec);
  const auto row = run_pipeline(b, kCam);
  ASSERT_EQ(row.outcome, PipelineOutcome::ok);
  EXPECT_EQ(row.frames_used, 10u);
  ASSERT_TRUE(row.gap);
  const double truth = b.ground_truth->at("range_lc_m").get<double>();
  EXPECT_LT(std::abs(row.gap->range_lc - truth) / truth, 0.005);
  EXPECT_NEAR(row.gap->range_rate, -1.5, 0.05);
  EXPECT_TRUE(row.screening.passes());
  ASSERT_TRUE(row.sv_speed_change);
  EXPECT_NEAR(*row.sv_speed_change, 0.0, 1e-9);
  const std::string csv = results_csv_row(row);
  EXPECT_EQ(csv.rfind("ev-a,left,non-ramp,ok,10,", 0), 0u) << csv;
}

TEST(Pipeline, SixFramesDiscarded)
{
  EventSpec spec;
  spec.n_frames = 6;
  const auto row = run_pipeline(sim_bundle(spec), kCam);
  EXPECT_EQ(row.outcome, PipelineOutcome::discarded_insufficient_frames);
  EXPECT_FALSE(row.gap);
  EXPECT_EQ(row.frames_used, 6u);
  const auto rec = parse_results_csv(std::string(kResultsHeader) + "\n" + results_csv_row(row)).at(0);
  EXPECT_FALSE(rec.range_lc);
  EXPECT_FALSE(rec.ttc_warning);
}

TEST(Pipeline, ShortTimeToCollisionWarns)
{
  EventSpec spec;
  spec.range_rate = -4.0;
  spec.initial_range = 12.0 + 4.0 * (4.5 + spec.lane_change_gap);
  const auto row = run_pipeline(sim_bundle(spec), kCam);
  ASSERT_EQ(row.outcome, PipelineOutcome::ok);
  ASSERT_TRUE(row.gap->ttc);
  EXPECT_NEAR(*row.gap->ttc, 3.0, 0.05);
  EXPECT_TRUE(row.gap->warnings.ttc);
  EXPECT_FALSE(row.gap->warnings.d_req);
  EXPECT_FALSE(row.gap->warnings.range);
}

TEST(Pipeline, OutcomeCodes)
{
  auto b = sim_bundle(EventSpec{});
  b.has_video = false;
  EXPECT_EQ(run_pipeline(b, kCam).outcome, PipelineOutcome::no_video);

  b = sim_bundle(EventSpec{});
  b.has_pov = false;
  EXPECT_EQ(run_pipeline(b, kCam).outcome, PipelineOutcome::no_pov);

  b = sim_bundle(EventSpec{});
  for (auto & s : b.event.channels.speed) s = 20.0;
  EXPECT_EQ(run_pipeline(b, kCam).outcome, PipelineOutcome::screened_out);

  b = sim_bundle(EventSpec{});
  drop_channel_samples(b.event.channels, *b.event.t_lc - 2.0, *b.event.t_lc - 1.0);
  EXPECT_EQ(run_pipeline(b, kCam).outcome, PipelineOutcome::screening_indeterminate);

  b = sim_bundle(EventSpec{});
  PipelineOptions ramp;
  ramp.ramp_db = RampDatabase{{{b.event.channels.lat.front(), b.event.channels.lon.front()}}};
  b.event.marker_pattern = "solid-solid";
  auto row = run_pipeline(b, kCam, ramp);
  EXPECT_EQ(row.outcome, PipelineOutcome::excluded_marker_pattern);
  EXPECT_EQ(row.subset, Subset::ramp);
  b.event.marker_pattern = "solid-dashed-solid";
  EXPECT_EQ(run_pipeline(b, kCam, ramp).outcome, PipelineOutcome::ok);

  b = sim_bundle(EventSpec{});
  for (auto & w : b.event.channels.lane_width) w = -1.0;
  b.event.lane_width = 0.0;
  EXPECT_EQ(run_pipeline(b, kCam).outcome, PipelineOutcome::invalid_lane_width);

  EventSpec stale;
  stale.lane_change_gap = 0.45;
  b = sim_bundle(stale);
  b.event.t_lc = *b.event.t_lc + 0.3;
  EXPECT_EQ(run_pipeline(b, kCam).outcome, PipelineOutcome::discarded_stale_frame);
}

TEST(Pipeline, OutcomeNamesRoundTrip)
{
  for (auto o : {PipelineOutcome::ok, PipelineOutcome::screened_out, PipelineOutcome::screening_indeterminate,
                 PipelineOutcome::excluded_marker_pattern, PipelineOutcome::no_video, PipelineOutcome::no_pov,
                 PipelineOutcome::invalid_lane_width, PipelineOutcome::discarded_insufficient_frames,
                 PipelineOutcome::discarded_stale_frame, PipelineOutcome::overlap_at_lane_change}) {
    EXPECT_EQ(parse_outcome(to_string(o)), o);
  }
  EXPECT_FALSE(parse_outcome("bogus"));
}

TEST(Pipeline, CatalogIsSortedAndIdempotent)
{
  std::vector<EventBundle> bundles;
  for (int k = 0; k < 12; ++k) {
    EventSpec spec;
    spec.event_id = "ev-" + std::to_string(11 - k);
    spec.initial_range = 20.0 + k;
    spec.n_frames = 5 + k % 6;
    bundles.push_back(sim_bundle(spec, 0.75, static_cast<std::uint64_t>(k)));
  }
  const auto rows = run_catalog(bundles, kCam);
  ASSERT_EQ(rows.size(), bundles.size());
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i - 1].event_id, rows[i].event_id);
  const std::string first = results_csv(rows);
  for (int rep = 0; rep < 5; ++rep) EXPECT_EQ(results_csv(run_catalog(bundles, kCam)), first);

  testing::TempDir tmp;
  write_results_csv(rows, tmp.path() / "r.csv");
  const auto recs = read_results_csv(tmp.path() / "r.csv");
  ASSERT_EQ(recs.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(recs[i].event_id, rows[i].event_id);
    EXPECT_EQ(recs[i].outcome, rows[i].outcome);
    EXPECT_EQ(recs[i].frames_used, rows[i].frames_used);
    EXPECT_EQ(recs[i].range_lc.has_value(), rows[i].gap.has_value());
    if (rows[i].gap) {
      EXPECT_EQ(*recs[i].range_lc, rows[i].gap->range_lc);
      EXPECT_EQ(*recs[i].range_rate, rows[i].gap->range_rate);
    }
  }
}

TEST(Pipeline, RejectsBadHeader)
{
  EXPECT_THROW(parse_results_csv("a,b\n1,2\n"), Error);
}

TEST(Pipeline, FixtureBundle)
{
  const auto b = load_event_bundle(testing::fixture("bundle_left10"));
  const auto row = run_pipeline(b, kCam);
  ASSERT_EQ(row.outcome, PipelineOutcome::ok);
  EXPECT_NEAR(row.gap->range_lc, 29.24, 0.5);
  const auto j = catalog_row_to_json(row);
  EXPECT_EQ(j.at("event_id"), "fixture-left-10");
  EXPECT_EQ(j.at("outcome"), "ok");
}

}  // namespace
}  // namespace truckgap
