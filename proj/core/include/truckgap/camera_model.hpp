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

#include <span>
#include <string>

namespace truckgap
{

/// Image coordinates in pixels. Origin top-left, u rightward, v downward.
/// Points outside the image are legal (extrapolated line samples).
struct PixelPoint
{
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const PixelPoint &, const PixelPoint &) = default;
};

/// Point on the normalized image plane (implicit z = 1). Used for both the
/// distorted and the ideal (undistorted) plane.
struct NormalizedPoint
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NormalizedPoint &, const NormalizedPoint &) = default;
};

/// Camera-frame position in meters: x right, y down, z along the optical axis.
struct CameraFramePoint
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Intrinsic parameters in the Bouguet toolbox convention. `skew` is the
/// dimensionless alpha_c: u = fx * (xd + skew * yd) + cx.
struct CameraIntrinsics
{
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  int image_width = 0;
  int image_height = 0;
  // Physical focal length as reported by calibration. Never used in math.
  double focal_length_mm = 0.0;

  friend bool operator==(const CameraIntrinsics &, const CameraIntrinsics &) = default;
};

/// Throws Error(invalid_argument) if the intrinsics violate their invariants.
void validate(const CameraIntrinsics & cam);

/// K^-1 * (u, v, 1): pixel to distorted normalized coordinates.
NormalizedPoint pixel_to_distorted_normalized(const PixelPoint & p, const CameraIntrinsics & cam);

/// Forward lens model: 3 radial + 2 tangential coefficients.
NormalizedPoint distort_point(const NormalizedPoint & p, const CameraIntrinsics & cam);

inline constexpr int kUndistortMaxIterations = 50;
inline constexpr double kUndistortTolerance = 1e-10;

/// Inverse of distort_point by fixed-point iteration
///   x <- (p_d - tangential(x)) / radial(x).
/// Converged when |distort_point(x) - p_d| <= kUndistortTolerance; throws
/// Error(non_convergence) with the final residual otherwise.
NormalizedPoint undistort_point(const NormalizedPoint & distorted, const CameraIntrinsics & cam);

/// Full pixel -> ideal normalized plane transform.
NormalizedPoint pixel_to_normalized(const PixelPoint & p, const CameraIntrinsics & cam);

/// K * distort_point(p).
PixelPoint normalized_to_pixel(const NormalizedPoint & p, const CameraIntrinsics & cam);

/// Perspective division onto the normalized plane. Requires z > 0.
NormalizedPoint project_to_normalized(const CameraFramePoint & p);

/// Root mean squared Euclidean residual in pixels.
double reprojection_rmse(std::span<const PixelPoint> observed, std::span<const PixelPoint> predicted);

}  // namespace truckgap
