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

#include "truckgap/gap_estimator.hpp"

#include "truckgap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace truckgap
{
namespace
{

constexpr double kMinMarkerSeparation = 1e-9;
constexpr double kMinRowCrossing = 1e-9;

std::vector<PixelPoint> reproject_marker(
  const Line2D & line, const std::array<NormalizedPoint, 2> & knots, double y_lo, double y_hi,
  const CameraIntrinsics & cam)
{
  std::vector<double> rows;
  rows.reserve(kOverlaySamples + 2);
  for (int i = 0; i < kOverlaySamples; ++i) {
    rows.push_back(y_lo + (y_hi - y_lo) * i / (kOverlaySamples - 1));
  }
  rows.push_back(knots[0].y);
  rows.push_back(knots[1].y);
  std::sort(rows.begin(), rows.end());

  std::vector<PixelPoint> out;
  out.reserve(rows.size());
  for (double y : rows) {
    // Knots reuse their exact normalized x so the polyline passes through the
    // annotated pixels up to round-trip error.
    double x = line.x_at(y);
    for (const auto & k : knots) {
      if (k.y == y) x = k.x;
    }
    out.push_back(normalized_to_pixel({x, y}, cam));
  }
  return out;
}

}  // namespace

std::string_view to_string(FrameStatus status)
{
  switch (status) {
    case FrameStatus::qualified: return "qualified";
    case FrameStatus::undistortion_failed: return "undistortion_failed";
    case FrameStatus::degenerate_annotation: return "degenerate_annotation";
    case FrameStatus::geometry_error: return "geometry_error";
    case FrameStatus::implausible_range: return "implausible_range";
  }
  return "unknown";
}

double Line2D::x_at(double y) const
{
  if (std::abs(direction.y) < kMinRowCrossing) {
    throw Error(ErrorCode::geometry, "marker line is parallel to the image row");
  }
  return point.x + direction.x * (y - point.y) / direction.y;
}

Line2D fit_marker_line(const NormalizedPoint & a, const NormalizedPoint & b)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (!(len > kMinMarkerSeparation)) {
    throw Error(ErrorCode::degenerate_annotation, "marker points coincide");
  }
  return {a, {dx / len, dy / len}};
}

double lane_width_at_pov(const Line2D & left, const Line2D & right, double pov_y)
{
  const double w = right.x_at(pov_y) - left.x_at(pov_y);
  if (!(w > kMinLaneWidthNormalized)) {
    throw Error(ErrorCode::geometry, "lane width at the POV row is not positive (crossed or mislabeled markers)");
  }
  return w;
}

CameraRange range_from_width(double lane_width_m, double lane_width_normalized, double trailer_length_m)
{
  if (!(lane_width_m > 0.0) || !std::isfinite(lane_width_m)) {
    throw Error(ErrorCode::invalid_argument, "reference lane width must be positive");
  }
  if (!(trailer_length_m >= 0.0) || !std::isfinite(trailer_length_m)) {
    throw Error(ErrorCode::invalid_argument, "trailer length must be non-negative");
  }
  if (!(lane_width_normalized > 0.0)) {
    throw Error(ErrorCode::geometry, "normalized lane width must be positive");
  }
  const double z = lane_width_m / lane_width_normalized;
  return {z, z - trailer_length_m};
}

RangeEstimate estimate_frame_range(
  const FrameAnnotation & frame, const CameraIntrinsics & cam, double lane_width_m,
  double trailer_length_m)
{
  validate(cam);
  if (!(lane_width_m > 0.0) || !std::isfinite(lane_width_m)) {
    throw Error(ErrorCode::invalid_argument, "reference lane width must be positive");
  }
  RangeEstimate est;
  est.t = frame.t;

  NormalizedPoint l0, l1, r0, r1, pov;
  try {
    l0 = pixel_to_normalized(frame.left_marker[0], cam);
    l1 = pixel_to_normalized(frame.left_marker[1], cam);
    r0 = pixel_to_normalized(frame.right_marker[0], cam);
    r1 = pixel_to_normalized(frame.right_marker[1], cam);
    pov = pixel_to_normalized(frame.pov, cam);
  } catch (const Error &) {
    est.status = FrameStatus::undistortion_failed;
    return est;
  }

  try {
    const Line2D left = fit_marker_line(l0, l1);
    const Line2D right = fit_marker_line(r0, r1);
    est.lane_width_normalized = lane_width_at_pov(left, right, pov.y);
  } catch (const Error & e) {
    est.status = e.code() == ErrorCode::degenerate_annotation ? FrameStatus::degenerate_annotation
                                                               : FrameStatus::geometry_error;
    return est;
  }

  const CameraRange cr = range_from_width(lane_width_m, est.lane_width_normalized, trailer_length_m);
  est.camera_distance = cr.camera_distance;
  est.range = cr.range;
  if (!(est.range > 0.0 && est.range <= kMaxPlausibleRange)) {
    est.status = FrameStatus::implausible_range;
  }
  return est;
}

Overlay overlay_segments(const FrameAnnotation & frame, const CameraIntrinsics & cam)
{
  validate(cam);
  const std::array<NormalizedPoint, 2> left_pts = {
    pixel_to_normalized(frame.left_marker[0], cam), pixel_to_normalized(frame.left_marker[1], cam)};
  const std::array<NormalizedPoint, 2> right_pts = {
    pixel_to_normalized(frame.right_marker[0], cam), pixel_to_normalized(frame.right_marker[1], cam)};
  const NormalizedPoint pov = pixel_to_normalized(frame.pov, cam);

  const Line2D left = fit_marker_line(left_pts[0], left_pts[1]);
  const Line2D right = fit_marker_line(right_pts[0], right_pts[1]);
  const double x_left = left.x_at(pov.y);
  const double x_right = right.x_at(pov.y);
  lane_width_at_pov(left, right, pov.y);

  // Row span: the annotated points plus a quarter of their extent on either
  // side, clipped to the rows visible along the principal column.
  double y_lo = std::min({left_pts[0].y, left_pts[1].y, right_pts[0].y, right_pts[1].y, pov.y});
  double y_hi = std::max({left_pts[0].y, left_pts[1].y, right_pts[0].y, right_pts[1].y, pov.y});
  const double margin = 0.25 * (y_hi - y_lo);
  double ext_lo = y_lo - margin;
  double ext_hi = y_hi + margin;
  try {
    const double top = pixel_to_normalized({cam.cx, 0.0}, cam).y;
    const double bottom = pixel_to_normalized({cam.cx, cam.image_height - 1.0}, cam).y;
    ext_lo = std::max(ext_lo, top);
    ext_hi = std::min(ext_hi, bottom);
  } catch (const Error &) {
    // Image edge outside the invertible region; keep the margin as is.
  }
  y_lo = std::min(y_lo, ext_lo);
  y_hi = std::max(y_hi, ext_hi);

  Overlay overlay;
  overlay.left_marker = reproject_marker(left, left_pts, y_lo, y_hi, cam);
  overlay.right_marker = reproject_marker(right, right_pts, y_lo, y_hi, cam);
  overlay.width_segment.reserve(kOverlaySamples);
  for (int i = 0; i < kOverlaySamples; ++i) {
    const double x = x_left + (x_right - x_left) * i / (kOverlaySamples - 1);
    overlay.width_segment.push_back(normalized_to_pixel({x, pov.y}, cam));
  }
  return overlay;
}

}  // namespace truckgap
