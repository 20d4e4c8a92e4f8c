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
#include "truckgap/event.hpp"
#include "truckgap/event_screening.hpp"
#include "truckgap/gap_estimator.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace truckgap
{

/// World frame: road plane y = 0 with y pointing down, lane centerline
/// along +z (rearward from the camera), x to the right in the image.
struct WorldPoint
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Camera extrinsics: X_C = rotation * X_world + translation.
/// Positive pitch raises the optical axis, so road points move down in the
/// image; yaw turns the axis toward +x; roll turns about the optical axis.
struct CameraPose
{
  Matrix3 rotation{};
  std::array<double, 3> translation{};
  double height = 0.0;  // m above the road
  double pitch = 0.0;   // degrees
  double roll = 0.0;    // degrees
  double yaw = 0.0;     // degrees

  static CameraPose from_angles(double height, double pitch_deg, double roll_deg, double yaw_deg);

  CameraFramePoint to_camera(const WorldPoint & p) const;
};

inline constexpr double kDefaultCameraHeight = 2.3;  // m, truck mirror

/// Intrinsics of the synthetic rear-view camera (1280x960, moderate barrel
/// distortion).
CameraIntrinsics default_synthetic_camera();

struct SyntheticScene
{
  double lane_width = 3.6;          // W_true, m
  double lane_center_offset = 2.0;  // lateral offset of the target lane center, m
  double station_offset = 5.0;      // marker points at Z -/+ this, m
  double pov_distance = 30.0;       // Z_true, camera to POV, m
  double trailer_length = 0.0;      // L, m
  CameraPose pose = CameraPose::from_angles(kDefaultCameraHeight, 0.0, 0.0, 0.0);
  CameraIntrinsics cam = default_synthetic_camera();
  double pixel_noise_sigma = 0.0;  // px
  std::uint64_t seed = 0;

  void validate() const;
};

/// Independent per-stream seed: splitmix64 of (base, stream). Trial i of an
/// experiment uses derive_seed(base, i).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// world -> camera frame -> normalized plane -> distortion -> pixels.
PixelPoint project_scene_point(const WorldPoint & p, const CameraPose & pose, const CameraIntrinsics & cam);

struct SyntheticFrame
{
  FrameAnnotation annotation;
  double true_range = 0.0;            // Z_true - L
  double true_camera_distance = 0.0;  // Z_true
};

/// Projects the two marker stations of each lane line and the POV ground
/// point, then adds isotropic Gaussian pixel noise drawn from
/// derive_seed(scene.seed, stream).
SyntheticFrame synthesize_frame(const SyntheticScene & scene, double t, std::uint64_t stream = 0);

struct EventSpec
{
  std::string event_id = "sim-0001";
  Direction direction = Direction::left;
  double initial_range = 40.0;  // R at the first frame, m
  double range_rate = -1.5;     // m/s
  int n_frames = 10;
  double frame_period = 0.5;     // s (2 Hz capture)
  double lane_change_gap = 0.3;  // t_lc - t_last, s, in [0, frame_period)
  double speed = 26.0;           // SV speed, m/s
  double heading = 90.0;         // degrees
  GeoPoint origin{42.28, -83.74};
  UtcTime utc_anchor{};  // defaults to 2024-06-15T17:00:00Z
};

struct SyntheticEvent
{
  LaneChangeEvent event;
  std::vector<double> true_ranges;  // per frame
  double true_range_lc = 0.0;
  double true_range_rate = 0.0;
};

/// Builds a complete lane-change event: 2 Hz frames with POV distance
/// L + R0 + Rdot * (t - t_first), 10 Hz channels for a straight highway
/// drive with a lane-offset trace that re-anchors at t_lc. Frame noise
/// streams are derive_seed(scene.seed, frame index).
SyntheticEvent synthesize_event(const EventSpec & spec, const SyntheticScene & scene);

/// Flat-road ranging from the POV row: Z = h / tan(atan(y) + pitch_error).
/// Throws Error(undefined_range) if the ray does not hit the road ahead.
double splay_range(double pov_y, double camera_height, double pitch_error_deg);

struct PitchSensitivity
{
  double splay_rel_err = 0.0;       // signed, relative to Z_true
  double lane_width_rel_err = 0.0;  // signed, relative to Z_true
};

/// Perturbs the pose pitch by pitch_error before projecting a noiseless
/// frame, then ranges it with both the splay method (which assumes the
/// nominal pitch) and the lane-width method.
PitchSensitivity pitch_sensitivity_experiment(const SyntheticScene & scene, double pitch_error_deg);

}  // namespace truckgap
