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

#include "truckgap/camera_model.hpp"

#include "truckgap/errors.hpp"

#include <cmath>
#include <sstream>

namespace truckgap
{
namespace
{

void require_finite(double a, double b, const char * what)
{
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::non_finite_input, std::string(what) + ": non-finite coordinate");
  }
}

double radial_factor(double r2, const CameraIntrinsics & cam)
{
  return 1.0 + r2 * (cam.k1 + r2 * (cam.k2 + r2 * cam.k3));
}

NormalizedPoint tangential_offset(double x, double y, const CameraIntrinsics & cam)
{
  const double r2 = x * x + y * y;
  return {
    2.0 * cam.p1 * x * y + cam.p2 * (r2 + 2.0 * x * x),
    cam.p1 * (r2 + 2.0 * y * y) + 2.0 * cam.p2 * x * y};
}

}  // namespace

void validate(const CameraIntrinsics & cam)
{
  const double coeffs[] = {cam.fx, cam.fy, cam.cx, cam.cy, cam.skew,
                           cam.k1, cam.k2, cam.k3, cam.p1, cam.p2};
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::invalid_argument, "camera intrinsics contain a non-finite value");
    }
  }
  if (cam.fx <= 0.0 || cam.fy <= 0.0) {
    throw Error(ErrorCode::invalid_argument, "camera focal lengths must be positive");
  }
  if (cam.image_width <= 0 || cam.image_height <= 0) {
    throw Error(ErrorCode::invalid_argument, "camera image size must be positive");
  }
  if (cam.cx < 0.0 || cam.cx >= cam.image_width || cam.cy < 0.0 || cam.cy >= cam.image_height) {
    throw Error(ErrorCode::invalid_argument, "principal point lies outside the image");
  }
}

NormalizedPoint pixel_to_distorted_normalized(const PixelPoint & p, const CameraIntrinsics & cam)
{
  require_finite(p.u, p.v, "pixel_to_distorted_normalized");
  const double yd = (p.v - cam.cy) / cam.fy;
  const double xd = (p.u - cam.cx) / cam.fx - cam.skew * yd;
  return {xd, yd};
}

NormalizedPoint distort_point(const NormalizedPoint & p, const CameraIntrinsics & cam)
{
  require_finite(p.x, p.y, "distort_point");
  const double radial = radial_factor(p.x * p.x + p.y * p.y, cam);
  const NormalizedPoint tangential = tangential_offset(p.x, p.y, cam);
  return {p.x * radial + tangential.x, p.y * radial + tangential.y};
}

NormalizedPoint undistort_point(const NormalizedPoint & distorted, const CameraIntrinsics & cam)
{
  require_finite(distorted.x, distorted.y, "undistort_point");

  NormalizedPoint x = distorted;
  double residual = 0.0;
  for (int iter = 0; iter <= kUndistortMaxIterations; ++iter) {
    const NormalizedPoint forward = distort_point(x, cam);
    residual = std::hypot(forward.x - distorted.x, forward.y - distorted.y);
    if (residual <= kUndistortTolerance) {
      return x;
    }
    if (iter == kUndistortMaxIterations || !std::isfinite(residual)) {
      break;
    }
    const double radial = radial_factor(x.x * x.x + x.y * x.y, cam);
    if (radial == 0.0 || !std::isfinite(radial)) {
      break;
    }
    const NormalizedPoint tangential = tangential_offset(x.x, x.y, cam);
    x = {(distorted.x - tangential.x) / radial, (distorted.y - tangential.y) / radial};
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) {
      break;
    }
  }

  std::ostringstream msg;
  msg << "undistortion did not converge within " << kUndistortMaxIterations
      << " iterations for (" << distorted.x << ", " << distorted.y << "); residual " << residual;
  throw Error(ErrorCode::non_convergence, msg.str());
}

NormalizedPoint pixel_to_normalized(const PixelPoint & p, const CameraIntrinsics & cam)
{
  return undistort_point(pixel_to_distorted_normalized(p, cam), cam);
}

PixelPoint normalized_to_pixel(const NormalizedPoint & p, const CameraIntrinsics & cam)
{
  const NormalizedPoint d = distort_point(p, cam);
  return {cam.fx * (d.x + cam.skew * d.y) + cam.cx, cam.fy * d.y + cam.cy};
}

NormalizedPoint project_to_normalized(const CameraFramePoint & p)
{
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
    throw Error(ErrorCode::non_finite_input, "project_to_normalized: non-finite coordinate");
  }
  if (p.z <= 0.0) {
    throw Error(ErrorCode::projection, "point is not in front of the camera");
  }
  return {p.x / p.z, p.y / p.z};
}

double reprojection_rmse(std::span<const PixelPoint> observed, std::span<const PixelPoint> predicted)
{
  if (observed.size() != predicted.size()) {
    throw Error(ErrorCode::length_mismatch, "reprojection_rmse: sequences differ in length");
  }
  if (observed.empty()) {
    throw Error(ErrorCode::empty_input, "reprojection_rmse: no points");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double du = observed[i].u - predicted[i].u;
    const double dv = observed[i].v - predicted[i].v;
    sum += du * du + dv * dv;
  }
  return std::sqrt(sum / static_cast<double>(observed.size()));
}

}  // namespace truckgap
