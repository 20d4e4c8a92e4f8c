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

#include "truckgap/errors.hpp"
#include "truckgap/synthetic_oracle.hpp"
#include "truckgap/trajectory_filter.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace truckgap
{
namespace
{

LineFit fit(const std::vector<double> & t, const std::vector<double> & r, const std::vector<double> & w)
{
  return weighted_line_fit(t, r, w);
}

double weighted_sse(const std::vector<double> & t, const std::vector<double> & r, const std::vector<double> & w,
                    double a1, double a2)
{
  long double s = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const long double e = r[i] - a1 * t[i] - a2;
    s += w[i] * e * e;
  }
  return static_cast<double>(s);
}

SyntheticEvent make_event(int n_frames, double gap = 0.3, double r0 = 40.0, double rate = -1.5, double noise = 0.0)
{
  EventSpec spec;
  spec.n_frames = n_frames;
  spec.lane_change_gap = gap;
  spec.initial_range = r0;
  spec.range_rate = rate;
  SyntheticScene scene;
  scene.pixel_noise_sigma = noise;
  scene.seed = 77;
  return synthesize_event(spec, scene);
}

TEST(ComputeWeights, Examples)
{
  EXPECT_EQ(compute_weights(std::vector<double>{10, 20, 40}), (std::vector<double>{1.0, 0.5, 0.25}));
  EXPECT_EQ(compute_weights(std::vector<double>{30}), (std::vector<double>{1.0}));
  EXPECT_EQ(compute_weights(std::vector<double>{25, 25, 25}), (std::vector<double>{1, 1, 1}));
}

TEST(ComputeWeights, RangeProperty)
{
  testing::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> r(static_cast<std::size_t>(rng.integer(1, 20)));
    for (auto & v : r) v = rng.uniform(1.0, 120.0);
    const auto w = compute_weights(r);
    EXPECT_EQ(*std::max_element(w.begin(), w.end()), 1.0);
    for (double x : w) {
      EXPECT_GT(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(ComputeWeights, Rejections)
{
  EXPECT_THROW(compute_weights(std::vector<double>{}), Error);
  EXPECT_THROW(compute_weights(std::vector<double>{10, 0}), Error);
  EXPECT_THROW(compute_weights(std::vector<double>{10, -3}), Error);
}

TEST(WeightedLineFit, ExactLineAnyWeights)
{
  const std::vector<double> t = {0, 1, 2}, r = {30, 28, 26};
  for (const auto & w : {std::vector<double>{1, 1, 1}, std::vector<double>{0.1, 5, 0.7}}) {
    const LineFit f = fit(t, r, w);
    EXPECT_NEAR(f.rate, -2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 30.0, 1e-13);
    EXPECT_EQ(f.n, 3u);
  }
}

TEST(WeightedLineFit, ConstantSeries)
{
  const LineFit f = fit({3, 4.5, 9, 11}, {20, 20, 20, 20}, {1, 0.3, 0.2, 0.9});
  EXPECT_NEAR(f.rate, 0.0, 1e-15);
  EXPECT_NEAR(f.intercept, 20.0, 1e-13);
  EXPECT_NEAR(f.weighted_sse, 0.0, 1e-24);
}

TEST(WeightedLineFit, MatchesDerivativeFreeMinimizer)
{
  const std::vector<double> t = {0, 1, 2, 3}, r = {30, 28.5, 25.8, 24.1};
  const auto w = compute_weights(r);
  const LineFit f = fit(t, r, w);
  const auto [a1, a2] = testing::derivative_free_weighted_fit(t, r, w);
  EXPECT_NEAR(f.rate, a1, 1e-6);
  EXPECT_NEAR(f.intercept, a2, 1e-6);
  EXPECT_NEAR(f.weighted_sse, weighted_sse(t, r, w, f.rate, f.intercept), 1e-12);
}

TEST(WeightedLineFit, SingularDesign)
{
  try {
    fit({2, 2, 2}, {10, 11, 12}, {1, 1, 1});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_design);
  }
  EXPECT_THROW(fit({1}, {10}, {1}), Error);
  EXPECT_THROW(fit({1, 2}, {10, 11}, {1, 0}), Error);
  EXPECT_THROW(fit({1, 2}, {10}, {1, 1}), Error);
}

TEST(WeightedLineFit, Properties)
{
  testing::Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 15));
    std::vector<double> t(n), r(n), w(n);
    const double t0 = rng.uniform(-50, 50);
    const double a1 = rng.uniform(-5, 5), a2 = rng.uniform(5, 80);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = t0 + 0.5 * static_cast<double>(i);
      r[i] = a1 * t[i] + a2;
      w[i] = rng.uniform(0.05, 3.0);
    }
    // Exact recovery on exact data.
    const LineFit exact = fit(t, r, w);
    EXPECT_NEAR(exact.rate, a1, 1e-12);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(exact.value_at(t[i]), r[i], 1e-12);

    for (auto & v : r) v += rng.normal(0.4);
    const LineFit f = fit(t, r, w);

    // Weight-scale invariance.
    std::vector<double> ws = w;
    const double c = rng.uniform(0.01, 100.0);
    for (auto & v : ws) v *= c;
    const LineFit g = fit(t, r, ws);
    EXPECT_NEAR(g.rate, f.rate, 1e-10);
    EXPECT_NEAR(g.intercept, f.intercept, 1e-8);

    // Local optimality of the weighted SSE.
    const double best = weighted_sse(t, r, w, f.rate, f.intercept);
    for (double d1 : {-1e-4, 0.0, 1e-4}) {
      for (double d2 : {-1e-4, 0.0, 1e-4}) {
        EXPECT_GE(weighted_sse(t, r, w, f.rate + d1, f.intercept + d2), best * (1 - 1e-12));
      }
    }

    // Time-shift equivariance of the predicted series.
    const double tau = rng.uniform(-100, 100);
    std::vector<double> ts = t;
    for (auto & v : ts) v += tau;
    const LineFit h = fit(ts, r, w);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(h.value_at(ts[i]), f.value_at(t[i]), 1e-9);
  }
}

TEST(Extrapolate, Examples)
{
  const LineFit f = fit({0, 1, 2}, {30, 28, 26}, {1, 1, 1});
  EXPECT_NEAR(extrapolate_to_lane_change(f, 2.0, 2.4), 25.2, 1e-12);
  EXPECT_NEAR(extrapolate_to_lane_change(f, 2.0, 2.0), 26.0, 1e-12);

  const std::vector<double> t = {0, 1, 2, 3}, r = {30, 28.5, 25.8, 24.1};
  const LineFit g = fit(t, r, compute_weights(r));
  EXPECT_NEAR(extrapolate_to_lane_change(g, 3.0, 3.3), g.intercept + g.rate * 3.3, 1e-12);
}

TEST(Extrapolate, StaleFrame)
{
  const LineFit f = fit({0, 1, 2}, {30, 28, 26}, {1, 1, 1});
  for (double t_lc : {2.61, 1.9}) {
    try {
      extrapolate_to_lane_change(f, 2.0, t_lc);
      FAIL();
    } catch (const Error & e) {
      EXPECT_EQ(e.code(), ErrorCode::stale_frame);
    }
  }
  EXPECT_NO_THROW(extrapolate_to_lane_change(f, 2.0, 2.6));
}

TEST(ReferenceLaneWidth, MedianOfWindowBeforeLaneChange)
{
  SyntheticEvent sim = make_event(10);
  LaneChangeEvent & ev = sim.event;
  auto & ch = ev.channels;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch.t[i] >= *ev.t_lc - 5 && ch.t[i] < *ev.t_lc) ch.lane_width[i] = 3.5 + 0.001 * static_cast<double>(i % 3);
    if (ch.t[i] >= *ev.t_lc) ch.lane_width[i] = 9.0;  // new lane, ignored
  }
  ch.lane_width[ch.nearest_index(*ev.t_lc - 2.0)] = 0.0;  // glitch, ignored
  EXPECT_NEAR(reference_lane_width(ev), 3.501, 1e-12);

  ch.lane_width.clear();
  ev.lane_width = 3.66;
  EXPECT_EQ(reference_lane_width(ev), 3.66);
  ev.lane_width = 0.0;
  EXPECT_THROW(reference_lane_width(ev), Error);
}

TEST(ProcessEventGap, NoiselessKinematics)
{
  const SyntheticEvent sim = make_event(10);
  const GapProcessing gp = process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
  ASSERT_EQ(gp.outcome, GapOutcome::ok);
  const GapResult & g = *gp.result;
  EXPECT_EQ(g.frames_used, 10u);
  EXPECT_LT(std::abs(g.range_lc / sim.true_range_lc - 1.0), 0.005);
  EXPECT_LT(std::abs(g.range_rate + 1.5), 0.05);
  EXPECT_NEAR(g.delta_t, 0.3, 1e-12);
  ASSERT_TRUE(g.ttc);
  EXPECT_NEAR(*g.ttc, -g.range_lc / g.range_rate, 1e-12);
  ASSERT_EQ(g.estimates.size(), 10u);
  EXPECT_LT(g.estimates.front().t, g.estimates.back().t);
}

TEST(ProcessEventGap, ZeroRateUnderNoise)
{
  const SyntheticEvent sim = make_event(10, 0.3, 25.0, 0.0, 0.75);
  const GapProcessing gp = process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
  ASSERT_EQ(gp.outcome, GapOutcome::ok);
  EXPECT_LT(std::abs(gp.result->range_rate), 0.05);
}

TEST(ProcessEventGap, SixFramesAreDiscarded)
{
  const SyntheticEvent sim = make_event(6);
  const GapProcessing gp = process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
  EXPECT_EQ(gp.outcome, GapOutcome::discarded_insufficient_frames);
  EXPECT_EQ(gp.qualified_frames, 6u);
  EXPECT_FALSE(gp.result);
}

TEST(ProcessEventGap, BrokenRunIsDiscarded)
{
  SyntheticEvent sim = make_event(9);
  auto & frames = sim.event.frames;
  std::swap(frames[frames.size() - 5].left_marker, frames[frames.size() - 5].right_marker);
  const GapProcessing gp = process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
  EXPECT_EQ(gp.outcome, GapOutcome::discarded_insufficient_frames);
  EXPECT_EQ(gp.qualified_frames, 4u);
}

TEST(ProcessEventGap, EarlyBreakDoesNotMatterWithSevenRecent)
{
  SyntheticEvent sim = make_event(10);
  std::swap(sim.event.frames[1].left_marker, sim.event.frames[1].right_marker);
  const GapProcessing gp = process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
  ASSERT_EQ(gp.outcome, GapOutcome::ok);
  EXPECT_EQ(gp.result->frames_used, 8u);
}

TEST(ProcessEventGap, FramesAfterLaneChangeAreIgnored)
{
  SyntheticEvent sim = make_event(10);
  const double t_lc = *sim.event.t_lc;
  FrameAnnotation late = sim.event.frames.back();
  late.t = t_lc + 0.2;
  std::swap(late.left_marker, late.right_marker);
  sim.event.frames.push_back(late);
  const GapProcessing gp = process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
  ASSERT_EQ(gp.outcome, GapOutcome::ok);
  EXPECT_EQ(gp.result->frames_used, 10u);
}

TEST(ProcessEventGap, StaleLastFrame)
{
  const SyntheticEvent sim = make_event(10, 0.7);
  const GapProcessing gp = process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
  EXPECT_EQ(gp.outcome, GapOutcome::discarded_stale_frame);
}

TEST(ProcessEventGap, OverlapAtLaneChange)
{
  EventSpec spec;
  spec.n_frames = 7;
  spec.initial_range = 6.5;
  spec.range_rate = -2.0;
  SyntheticScene scene;
  scene.trailer_length = 14.0;
  const SyntheticEvent sim = synthesize_event(spec, scene);
  const GapProcessing gp = process_event_gap(sim.event, scene.cam, 3.6, 14.0);
  ASSERT_EQ(gp.outcome, GapOutcome::overlap_at_lane_change);
  ASSERT_TRUE(gp.result);
  EXPECT_LE(gp.result->range_lc, 0.0);
  EXPECT_FALSE(gp.result->d_req);
}

TEST(ProcessEventGap, MissingLaneChangeTime)
{
  SyntheticEvent sim = make_event(10);
  sim.event.t_lc.reset();
  try {
    process_event_gap(sim.event, SyntheticScene{}.cam, 3.6, 0.0);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::malformed_event);
  }
}

}  // namespace
}  // namespace truckgap
