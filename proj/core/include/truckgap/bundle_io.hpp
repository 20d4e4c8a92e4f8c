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

#include "truckgap/analysis_stats.hpp"
#include "truckgap/conflict_metrics.hpp"
#include "truckgap/errors.hpp"
#include "truckgap/event.hpp"
#include "truckgap/event_screening.hpp"
#include "truckgap/synthetic_oracle.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace truckgap
{

/// "YYYY-MM-DDTHH:MM:SS[.fff]Z"
UtcTime parse_utc(const std::string & text);
std::string format_utc(UtcTime t);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

CameraIntrinsics camera_from_json(const nlohmann::json & j);
nlohmann::json camera_to_json(const CameraIntrinsics & cam);
CameraIntrinsics load_camera(const std::filesystem::path & path);

/// Keys ttc_max_s, d_req_min_mps2, right_range_min_m; missing keys keep
/// their defaults.
WarningThresholds thresholds_from_json(const nlohmann::json & j);
WarningThresholds load_thresholds(const std::filesystem::path & path);

/// One "lat,lon" record per line; blank lines and '#' comments skipped.
RampDatabase load_ramp_database(const std::filesystem::path & path);

/// A frame image in the event, with its five points once annotated.
struct FrameSlot
{
  double t = 0.0;
  std::string image;
  std::optional<FrameAnnotation> points;
};

struct EventBundle
{
  LaneChangeEvent event;  // event.frames mirrors the annotated slots
  std::vector<FrameSlot> slots;
  Subset subset = Subset::non_ramp;
  bool has_video = false;
  bool has_pov = false;
  std::vector<TimedRange> radar;
  std::optional<nlohmann::json> ground_truth;  // synthetic bundles only
  std::filesystem::path root;

  /// Rebuilds event.frames from the annotated slots.
  void sync_frames();
};

struct SchemaViolation
{
  std::string field;
  std::string message;
};

class BundleError : public Error
{
public:
  BundleError(std::filesystem::path path, std::vector<SchemaViolation> violations);

  const std::vector<SchemaViolation> & violations() const { return violations_; }

private:
  std::vector<SchemaViolation> violations_;
};

inline constexpr const char * kMetadataFile = "event.json";
inline constexpr const char * kChannelsFile = "channels.csv";
inline constexpr const char * kFramesDir = "frames";
inline constexpr const char * kAnnotationsFile = "annotations.json";
inline constexpr const char * kRadarFile = "radar.csv";

/// Loads and validates one event directory. Throws BundleError listing
/// every schema violation found.
EventBundle load_event_bundle(const std::filesystem::path & dir);

/// Writes the bundle in canonical form (sorted JSON keys, shortest
/// round-trip numbers). Creates the directory if needed.
void save_event_bundle(const EventBundle & bundle, const std::filesystem::path & dir);

/// Rewrites only frames/annotations.json, atomically (temp file + rename).
void save_annotations(const EventBundle & bundle, const std::filesystem::path & dir);

nlohmann::json annotations_to_json(const std::vector<FrameSlot> & slots);

/// Wraps a synthesized event as a bundle whose metadata carries a
/// ground_truth block (ignored by the pipeline).
EventBundle make_synthetic_bundle(const SyntheticEvent & sim, const SyntheticScene & scene);

/// Lists event directories (those containing event.json) under root,
/// sorted by name.
std::vector<std::filesystem::path> list_event_dirs(const std::filesystem::path & root);

}  // namespace truckgap
