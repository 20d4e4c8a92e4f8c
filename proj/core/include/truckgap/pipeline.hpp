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

#include "truckgap/bundle_io.hpp"
#include "truckgap/camera_model.hpp"
#include "truckgap/conflict_metrics.hpp"
#include "truckgap/event_screening.hpp"
#include "truckgap/trajectory_filter.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace truckgap
{

enum class PipelineOutcome {
  ok,
  screened_out,
  screening_indeterminate,
  excluded_marker_pattern,
  no_video,
  no_pov,
  invalid_lane_width,
  discarded_insufficient_frames,
  discarded_stale_frame,
  overlap_at_lane_change,
};

std::string_view to_string(PipelineOutcome outcome);
std::optional<PipelineOutcome> parse_outcome(std::string_view text);

/// One event's summary. Every event in a run yields a row, whatever its
/// outcome.
struct CatalogRow
{
  std::string event_id;
  Direction direction = Direction::left;
  Subset subset = Subset::non_ramp;
  bool has_video = false;
  bool has_pov = false;
  std::optional<std::string> scenario_label;
  PipelineOutcome outcome = PipelineOutcome::ok;
  ScreeningResult screening;
  std::size_t frames_used = 0;
  std::optional<GapResult> gap;
  std::optional<double> sv_speed_change;  // m/s over the 5 s before t_lc
};

struct PipelineOptions
{
  WarningThresholds thresholds;
  // When set, screening decides the subset; otherwise the bundle's label
  // is kept and the ramp flag is left false.
  std::optional<RampDatabase> ramp_db;
  std::set<std::string> ramp_marker_patterns = default_marker_patterns();
};

/// Screening, then gap processing and conflict metrics. Throws only for an
/// invalid camera; every data-dependent failure becomes an outcome code.
CatalogRow run_pipeline(const EventBundle & bundle, const CameraIntrinsics & cam, const PipelineOptions & options = {});

/// Runs the bundles in parallel and returns rows sorted by event_id.
std::vector<CatalogRow> run_catalog(
  std::span<const EventBundle> bundles, const CameraIntrinsics & cam, const PipelineOptions & options = {});

inline constexpr const char * kResultsHeader =
  "event_id,direction,subset,outcome,frames_used,R_lc_m,rdot_mps,delta_t_s,ttc_s,d_req_mps2,"
  "ttc_warning,d_req_warning,range_warning,sv_speed_change_mps";

std::string results_csv_row(const CatalogRow & row);
std::string results_csv(std::span<const CatalogRow> rows);
void write_results_csv(std::span<const CatalogRow> rows, const std::filesystem::path & path);

/// A parsed results line. Undefined values stay empty.
struct ResultRecord
{
  std::string event_id;
  Direction direction = Direction::left;
  Subset subset = Subset::non_ramp;
  PipelineOutcome outcome = PipelineOutcome::ok;
  std::size_t frames_used = 0;
  std::optional<double> range_lc;
  std::optional<double> range_rate;
  std::optional<double> delta_t;
  std::optional<double> ttc;
  std::optional<double> d_req;
  std::optional<bool> ttc_warning;
  std::optional<bool> d_req_warning;
  std::optional<bool> range_warning;
  std::optional<double> sv_speed_change;
};

std::vector<ResultRecord> read_results_csv(const std::filesystem::path & path);
std::vector<ResultRecord> parse_results_csv(const std::string & text);

nlohmann::json range_estimate_to_json(const RangeEstimate & estimate);
nlohmann::json overlay_to_json(const Overlay & overlay);
nlohmann::json gap_result_to_json(const GapResult & result);
nlohmann::json catalog_row_to_json(const CatalogRow & row);

}  // namespace truckgap
