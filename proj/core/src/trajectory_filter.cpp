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

#include "truckgap/trajectory_filter.hpp"

#include "truckgap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace truckgap
{

std::string_view to_string(GapOutcome outcome)
{
  switch (outcome) {
    case GapOutcome::ok: return "ok";
    case GapOutcome::discarded_insufficient_frames: return "discarded_insufficient_frames";
    case GapOutcome::discarded_stale_frame: return "discarded_stale_frame";
    case GapOutcome::overlap_at_lane_change: return "overlap_at_lane_change";
  }
  return "unknown";
}

std::vector<double> compute_weights(std::span<const double> ranges)
{
  if (ranges.empty()) {
    throw Error(ErrorCode::empty_input, "compute_weights: no ranges");
  }
  for (double r : ranges) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::invalid_argument, "compute_weights: ranges must be positive");
    }
  }
  const double r_min = *std::min_element(ranges.begin(), ranges.end());
  std::vector<double> weights;
  weights.reserve(ranges.size());
  for (double r : ranges) {
    weights.push_back(r == r_min ? 1.0 : r_min / r);
  }
  return weights;
}

LineFit weighted_line_fit(
  std::span<const double> times, std::span<const double> ranges, std::span<const double> weights)
{
  const std::size_t n = times.size();
  if (ranges.size() != n || weights.size() != n) {
    throw Error(ErrorCode::length_mismatch, "weighted_line_fit: input lengths differ");
  }
  if (n < 2) {
    throw Error(ErrorCode::singular_design, "weighted_line_fit: need at least two samples");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(ranges[i])) {
      throw Error(ErrorCode::non_finite_input, "weighted_line_fit: non-finite sample");
    }
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::invalid_argument, "weighted_line_fit: weights must be positive");
    }
  }
  const auto [t_min, t_max] = std::minmax_element(times.begin(), times.end());
  if (*t_min == *t_max) {
    throw Error(ErrorCode::singular_design, "weighted_line_fit: all sample times are identical");
  }

  double t_ref = 0.0;
  for (double t : times) t_ref += t;
  t_ref /= static_cast<double>(n);

  // Normal equations in shifted time s = t - t_ref:
  //   [Sw  Ss ] [level]   [Sr ]
  //   [Ss  Sss] [rate ] = [Ssr]
  double sw = 0.0, ss = 0.0, sss = 0.0, sr = 0.0, ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = times[i] - t_ref;
    const double w = weights[i];
    sw += w;
    ss += w * s;
    sss += w * s * s;
    sr += w * ranges[i];
    ssr += w * s * ranges[i];
  }
  const double det = sw * sss - ss * ss;
  if (!(det > 0.0)) {
    throw Error(ErrorCode::singular_design, "weighted_line_fit: singular normal equations");
  }

  LineFit fit;
  fit.t_ref = t_ref;
  fit.n = n;
  fit.rate = (sw * ssr - ss * sr) / det;
  fit.level = (sss * sr - ss * ssr) / det;
  fit.intercept = fit.level - fit.rate * t_ref;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ranges[i] - fit.value_at(times[i]);
    fit.weighted_sse += weights[i] * r * r;
  }
  return fit;
}

double extrapolate_to_lane_change(const LineFit & fit, double t_n, double t_lc)
{
  // Frame and channel clocks are decimal; allow their rounding at the bound.
  constexpr double kClockSlack = 1e-9;
  const double dt = t_lc - t_n;
  if (!(dt >= 0.0) || dt > kMaxExtrapolation + kClockSlack) {
    throw Error(
      ErrorCode::stale_frame, "lane-change time is not within " + std::to_string(kMaxExtrapolation) +
                                " s after the last frame");
  }
  return fit.rate * dt + fit.value_at(t_n);
}

double reference_lane_width(const LaneChangeEvent & event)
{
  if (event.channels.has_lane_width() && event.t_lc) {
    std::vector<double> window;
    const auto & ch = event.channels;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (ch.t[i] >= *event.t_lc - kLaneWidthWindow && ch.t[i] < *event.t_lc &&
          std::isfinite(ch.lane_width[i]) && ch.lane_width[i] > 0.0) {
        window.push_back(ch.lane_width[i]);
      }
    }
    if (!window.empty()) {
      std::sort(window.begin(), window.end());
      const std::size_t mid = window.size() / 2;
      return window.size() % 2 ? window[mid] : 0.5 * (window[mid - 1] + window[mid]);
    }
  }
  if (!(event.lane_width > 0.0)) {
    throw Error(ErrorCode::malformed_event, "event " + event.event_id + " has no usable lane width");
  }
  return event.lane_width;
}

GapProcessing process_event_gap(
  const LaneChangeEvent & event, const CameraIntrinsics & cam, double lane_width_m,
  double trailer_length_m, const WarningThresholds & thresholds)
{
  if (!event.t_lc) {
    throw Error(ErrorCode::malformed_event, "event " + event.event_id + " has no lane-change time");
  }
  const double t_lc = *event.t_lc;

  // Last frame at or before t_lc, then backward while frames qualify.
  const auto & frames = event.frames;
  auto first_after = std::upper_bound(
    frames.begin(), frames.end(), t_lc,
    [](double t, const FrameAnnotation & f) { return t < f.t; });

  std::vector<RangeEstimate> run;
  for (auto it = first_after; it != frames.begin();) {
    --it;
    RangeEstimate est = estimate_frame_range(*it, cam, lane_width_m, trailer_length_m);
    if (!est.qualified()) break;
    run.push_back(est);
  }

  GapProcessing out;
  out.qualified_frames = run.size();
  if (run.size() < kMinConsecutiveFrames) {
    out.outcome = GapOutcome::discarded_insufficient_frames;
    return out;
  }
  std::reverse(run.begin(), run.end());

  const double t_n = run.back().t;
  if (t_lc - t_n > kMaxExtrapolation) {
    out.outcome = GapOutcome::discarded_stale_frame;
    return out;
  }

  std::vector<double> times, ranges;
  times.reserve(run.size());
  ranges.reserve(run.size());
  for (const auto & e : run) {
    times.push_back(e.t);
    ranges.push_back(e.range);
  }
  const std::vector<double> weights = compute_weights(ranges);

  GapResult res;
  res.event_id = event.event_id;
  res.direction = event.direction;
  res.fit = weighted_line_fit(times, ranges, weights);
  res.range_rate = res.fit.rate;
  res.t_n = t_n;
  res.delta_t = t_lc - t_n;
  res.range_lc = extrapolate_to_lane_change(res.fit, t_n, t_lc);
  res.frames_used = run.size();
  res.ttc = time_to_collision(res.range_lc, res.range_rate);
  res.estimates = std::move(run);

  if (res.range_lc > 0.0) {
    res.d_req = required_deceleration(res.range_lc, res.range_rate);
    res.warnings = warning_decision(event.direction, res.range_lc, res.range_rate, thresholds);
    out.outcome = GapOutcome::ok;
  } else {
    out.outcome = GapOutcome::overlap_at_lane_change;
  }
  out.result = std::move(res);
  return out;
}

}  // namespace truckgap
