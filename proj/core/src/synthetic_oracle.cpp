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

#include "truckgap/synthetic_oracle.hpp"

#include "truckgap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace truckgap
{
namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMinProjectionDepth = 0.1;  // m

Matrix3 multiply(const Matrix3 & a, const Matrix3 & b)
{
  Matrix3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Matrix3 rot_x(double a)
{
  const double c = std::cos(a), s = std::sin(a);
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}

Matrix3 rot_y(double a)
{
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}

Matrix3 rot_z(double a)
{
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

UtcTime default_anchor()
{
  using namespace std::chrono;
  return UtcTime{sys_days{2024y / June / 15} + hours{17}};
}

// Lane offset trace of a single lane change whose re-anchor happens at t_lc.
// Right lane changes drift to +W/2 and jump to -W/2.
double lane_offset_at(double t, double t_lc, double half_width, Direction dir)
{
  constexpr double kManeuver = 3.0;  // s on each side of t_lc
  const double sign = dir == Direction::right ? 1.0 : -1.0;
  if (t < t_lc - kManeuver || t >= t_lc + kManeuver) return 0.0;
  if (t < t_lc) return sign * half_width * (t - (t_lc - kManeuver)) / kManeuver;
  return -sign * half_width * (t_lc + kManeuver - t) / kManeuver;
}

}  // namespace

CameraPose CameraPose::from_angles(double height, double pitch_deg, double roll_deg, double yaw_deg)
{
  if (!(height > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "camera height must be positive");
  }
  CameraPose pose;
  pose.height = height;
  pose.pitch = pitch_deg;
  pose.roll = roll_deg;
  pose.yaw = yaw_deg;
  pose.rotation =
    multiply(rot_z(roll_deg * kDeg), multiply(rot_x(-pitch_deg * kDeg), rot_y(yaw_deg * kDeg)));
  // Camera center sits at (0, -h, 0) in the world; t = -R * C.
  for (int i = 0; i < 3; ++i) pose.translation[i] = pose.rotation[i][1] * height;
  return pose;
}

CameraFramePoint CameraPose::to_camera(const WorldPoint & p) const
{
  const double w[3] = {p.x, p.y, p.z};
  double c[3];
  for (int i = 0; i < 3; ++i) {
    c[i] = rotation[i][0] * w[0] + rotation[i][1] * w[1] + rotation[i][2] * w[2] + translation[i];
  }
  return {c[0], c[1], c[2]};
}

CameraIntrinsics default_synthetic_camera()
{
  CameraIntrinsics cam;
  cam.fx = 1100.0;
  cam.fy = 1100.0;
  cam.cx = 640.0;
  cam.cy = 480.0;
  cam.k1 = -0.12;
  cam.k2 = 0.02;
  cam.p1 = 0.0005;
  cam.p2 = -0.0003;
  cam.image_width = 1280;
  cam.image_height = 960;
  return cam;
}

void SyntheticScene::validate() const
{
  if (!(lane_width > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "scene lane width must be positive");
  }
  if (!(trailer_length >= 0.0) || !(pov_distance > trailer_length)) {
    throw Error(ErrorCode::invalid_argument, "scene requires Z_true > L >= 0");
  }
  if (!(station_offset > 0.0) || !(pixel_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "scene station offset or noise sigma invalid");
  }
  truckgap::validate(cam);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PixelPoint project_scene_point(const WorldPoint & p, const CameraPose & pose, const CameraIntrinsics & cam)
{
  const CameraFramePoint c = pose.to_camera(p);
  if (!(c.z > kMinProjectionDepth)) {
    throw Error(ErrorCode::projection, "scene point is behind the camera");
  }
  return normalized_to_pixel(project_to_normalized(c), cam);
}

SyntheticFrame synthesize_frame(const SyntheticScene & scene, double t, std::uint64_t stream)
{
  scene.validate();
  const double z = scene.pov_distance;
  const double near = std::max(z - scene.station_offset, 0.5 * z);
  const double far = z + scene.station_offset;
  const double x_left = scene.lane_center_offset - 0.5 * scene.lane_width;
  const double x_right = scene.lane_center_offset + 0.5 * scene.lane_width;

  SyntheticFrame out;
  FrameAnnotation & fa = out.annotation;
  fa.t = t;
  fa.left_marker = {project_scene_point({x_left, 0.0, near}, scene.pose, scene.cam),
                    project_scene_point({x_left, 0.0, far}, scene.pose, scene.cam)};
  fa.right_marker = {project_scene_point({x_right, 0.0, near}, scene.pose, scene.cam),
                     project_scene_point({x_right, 0.0, far}, scene.pose, scene.cam)};
  fa.pov = project_scene_point({scene.lane_center_offset, 0.0, z}, scene.pose, scene.cam);

  if (scene.pixel_noise_sigma > 0.0) {
    std::mt19937_64 rng(derive_seed(scene.seed, stream));
    std::normal_distribution<double> noise(0.0, scene.pixel_noise_sigma);
    auto jitter = [&](PixelPoint & p) {
      p.u += noise(rng);
      p.v += noise(rng);
    };
    for (auto & p : fa.left_marker) jitter(p);
    for (auto & p : fa.right_marker) jitter(p);
    jitter(fa.pov);
  }

  out.true_camera_distance = z;
  out.true_range = z - scene.trailer_length;
  return out;
}

SyntheticEvent synthesize_event(const EventSpec & spec, const SyntheticScene & scene)
{
  if (spec.n_frames < 1 || !(spec.frame_period > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "event needs at least one frame and a positive period");
  }
  if (!(spec.lane_change_gap >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "lane-change gap must be non-negative");
  }

  // Frames end at t_last >= 10 s so the 5 s look-back windows stay covered.
  const double span = (spec.n_frames - 1) * spec.frame_period;
  const double t_last = 10.0 + std::max(0.0, span - 8.0);
  const double t_first = t_last - span;
  const double t_lc = t_last + spec.lane_change_gap;

  SyntheticEvent out;
  out.true_range_rate = spec.range_rate;
  out.true_range_lc = spec.initial_range + spec.range_rate * (t_lc - t_first);

  LaneChangeEvent & ev = out.event;
  ev.event_id = spec.event_id;
  ev.direction = spec.direction;
  ev.t_lc = t_lc;
  ev.t_start = t_lc - 3.0;
  ev.t_end = t_lc + 3.0;
  ev.trailer_length = scene.trailer_length;
  ev.lane_width = scene.lane_width;

  for (int k = 0; k < spec.n_frames; ++k) {
    const double t = t_first + k * spec.frame_period;
    const double range = spec.initial_range + spec.range_rate * (t - t_first);
    if (!(range > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "synthetic range is not positive inside the window");
    }
    SyntheticScene frame_scene = scene;
    frame_scene.pov_distance = range + scene.trailer_length;
    SyntheticFrame f = synthesize_frame(frame_scene, t, static_cast<std::uint64_t>(k));
    f.annotation.image_ref = "frame_" + std::to_string(k) + ".png";
    ev.frames.push_back(std::move(f.annotation));
    out.true_ranges.push_back(range);
  }

  ChannelSeries & ch = ev.channels;
  ch.utc_anchor = spec.utc_anchor == UtcTime{} ? default_anchor() : spec.utc_anchor;
  const int n_samples = static_cast<int>(std::ceil((t_lc + 10.0) * 10.0)) + 1;
  const double heading = spec.heading * kDeg;
  const double m_per_deg_lat = kEarthRadius * kDeg;
  const double m_per_deg_lon = m_per_deg_lat * std::cos(spec.origin.lat * kDeg);
  for (int i = 0; i < n_samples; ++i) {
    const double t = i / 10.0;
    const double dist = spec.speed * t;
    ch.t.push_back(t);
    ch.speed.push_back(spec.speed);
    ch.heading.push_back(spec.heading);
    ch.lane_offset.push_back(lane_offset_at(t, t_lc, 0.5 * scene.lane_width, spec.direction));
    ch.lat.push_back(spec.origin.lat + dist * std::cos(heading) / m_per_deg_lat);
    ch.lon.push_back(spec.origin.lon + dist * std::sin(heading) / m_per_deg_lon);
    ch.lane_width.push_back(scene.lane_width);
  }
  return out;
}

double splay_range(double pov_y, double camera_height, double pitch_error_deg)
{
  const double angle = std::atan(pov_y) + pitch_error_deg * kDeg;
  if (!(angle > 0.0) || !(angle < 0.5 * std::numbers::pi)) {
    throw Error(ErrorCode::undefined_range, "ray through the POV row does not meet the road ahead");
  }
  return camera_height / std::tan(angle);
}

PitchSensitivity pitch_sensitivity_experiment(const SyntheticScene & scene, double pitch_error_deg)
{
  SyntheticScene perturbed = scene;
  perturbed.pixel_noise_sigma = 0.0;
  perturbed.pose = CameraPose::from_angles(
    scene.pose.height, scene.pose.pitch + pitch_error_deg, scene.pose.roll, scene.pose.yaw);

  const SyntheticFrame frame = synthesize_frame(perturbed, 0.0);
  const double z_true = frame.true_camera_distance;

  const double pov_y = pixel_to_normalized(frame.annotation.pov, scene.cam).y;
  // The splay estimator knows only the nominal pitch.
  const double splay = splay_range(pov_y, scene.pose.height, -scene.pose.pitch);

  const RangeEstimate est = estimate_frame_range(frame.annotation, scene.cam, scene.lane_width, 0.0);
  if (est.status != FrameStatus::qualified) {
    throw Error(ErrorCode::geometry, "lane-width ranging failed on the perturbed frame");
  }
  return {(splay - z_true) / z_true, (est.camera_distance - z_true) / z_true};
}

}  // namespace truckgap
