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

#include "truckgap/camera_model.hpp"

#include <array>
#include <string>
#include <vector>

namespace truckgap
{

/// The five operator-selected points of one rear-view frame: two points on
/// each marker of the target lane, and the bottom edge of the shadow under
/// the POV.
struct FrameAnnotation
{
  double t = 0.0;  // seconds, event-relative
  std::array<PixelPoint, 2> left_marker{};
  std::array<PixelPoint, 2> right_marker{};
  PixelPoint pov{};
  std::string image_ref;

  friend bool operator==(const FrameAnnotation &, const FrameAnnotation &) = default;
};

/// Straight lane marker on the ideal normalized plane.
struct Line2D
{
  NormalizedPoint point;
  NormalizedPoint direction;  // unit norm

  /// x coordinate where the line crosses the row y. Throws Error(geometry)
  /// when the line is (numerically) parallel to the row.
  double x_at(double y) const;
};

enum class FrameStatus {
  qualified,
  undistortion_failed,
  degenerate_annotation,
  geometry_error,
  implausible_range,
};

std::string_view to_string(FrameStatus status);

struct RangeEstimate
{
  double t = 0.0;
  double lane_width_normalized = 0.0;  // w
  double camera_distance = 0.0;        // Z_C, camera to POV (m)
  double range = 0.0;                  // R = Z_C - L (m)
  FrameStatus status = FrameStatus::qualified;

  bool qualified() const { return status == FrameStatus::qualified; }
};

struct CameraRange
{
  double camera_distance;  // Z_C
  double range;            // R
};

inline constexpr double kMinLaneWidthNormalized = 1e-6;
inline constexpr double kMaxPlausibleRange = 120.0;

Line2D fit_marker_line(const NormalizedPoint & a, const NormalizedPoint & b);

/// Width of the lane along the normalized row through the POV:
/// x_right(pov_y) - x_left(pov_y).
double lane_width_at_pov(const Line2D & left, const Line2D & right, double pov_y);

/// Similar triangles, Z_C = W / w, followed by the trailer correction
/// R = Z_C - L. R is returned as-is even when it is not positive.
CameraRange range_from_width(double lane_width_m, double lane_width_normalized, double trailer_length_m);

/// Range for a single annotated frame. Geometry problems and failed
/// undistortion mark the estimate unqualified instead of throwing; only an
/// invalid camera or a non-positive lane width throw.
RangeEstimate estimate_frame_range(
  const FrameAnnotation & frame, const CameraIntrinsics & cam, double lane_width_m,
  double trailer_length_m);

/// Reprojection of the reconstructed geometry onto the original image, used
/// by the operator to validate a pick.
struct Overlay
{
  std::vector<PixelPoint> left_marker;
  std::vector<PixelPoint> right_marker;
  std::vector<PixelPoint> width_segment;
};

inline constexpr int kOverlaySamples = 24;

Overlay overlay_segments(const FrameAnnotation & frame, const CameraIntrinsics & cam);

}  // namespace truckgap
