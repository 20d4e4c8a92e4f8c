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

#include "truckgap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace truckgap
{
using nlohmann::json;

namespace
{

constexpr PipelineOutcome kAllOutcomes[] = {
  PipelineOutcome::ok,
  PipelineOutcome::screened_out,
  PipelineOutcome::screening_indeterminate,
  PipelineOutcome::excluded_marker_pattern,
  PipelineOutcome::no_video,
  PipelineOutcome::no_pov,
  PipelineOutcome::invalid_lane_width,
  PipelineOutcome::discarded_insufficient_frames,
  PipelineOutcome::discarded_stale_frame,
  PipelineOutcome::overlap_at_lane_change,
};

PipelineOutcome from_gap_outcome(GapOutcome o)
{
  switch (o) {
    case GapOutcome::ok: return PipelineOutcome::ok;
    case GapOutcome::discarded_insufficient_frames: return PipelineOutcome::discarded_insufficient_frames;
    case GapOutcome::discarded_stale_frame: return PipelineOutcome::discarded_stale_frame;
    case GapOutcome::overlap_at_lane_change: return PipelineOutcome::overlap_at_lane_change;
  }
  return PipelineOutcome::ok;
}

std::string opt_number(const std::optional<double> & v) { return v ? format_number(*v) : std::string(); }

std::string flag(bool b) { return b ? "1" : "0"; }

json opt_json(const std::optional<double> & v) { return v ? json(*v) : json(nullptr); }

std::vector<std::string> split_csv(const std::string & line)
{
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::optional<double> parse_opt_number(const std::string & s, const std::string & column)
{
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size()) {
    throw Error(ErrorCode::schema, "results column " + column + ": not a number: '" + s + "'");
  }
  return v;
}

std::optional<bool> parse_opt_flag(const std::string & s, const std::string & column)
{
  if (s.empty()) return std::nullopt;
  if (s == "0") return false;
  if (s == "1") return true;
  throw Error(ErrorCode::schema, "results column " + column + ": expected 0 or 1, got '" + s + "'");
}

}  // namespace

std::string_view to_string(PipelineOutcome outcome)
{
  switch (outcome) {
    case PipelineOutcome::ok: return "ok";
    case PipelineOutcome::screened_out: return "screened_out";
    case PipelineOutcome::screening_indeterminate: return "screening_indeterminate";
    case PipelineOutcome::excluded_marker_pattern: return "excluded_marker_pattern";
    case PipelineOutcome::no_video: return "no_video";
    case PipelineOutcome::no_pov: return "no_pov";
    case PipelineOutcome::invalid_lane_width: return "invalid_lane_width";
    case PipelineOutcome::discarded_insufficient_frames: return "discarded_insufficient_frames";
    case PipelineOutcome::discarded_stale_frame: return "discarded_stale_frame";
    case PipelineOutcome::overlap_at_lane_change: return "overlap_at_lane_change";
  }
  return "unknown";
}

std::optional<PipelineOutcome> parse_outcome(std::string_view text)
{
  for (auto o : kAllOutcomes) {
    if (to_string(o) == text) return o;
  }
  return std::nullopt;
}

CatalogRow run_pipeline(const EventBundle & bundle, const CameraIntrinsics & cam, const PipelineOptions & options)
{
  validate(cam);
  options.thresholds.validate();

  const LaneChangeEvent & ev = bundle.event;
  CatalogRow row;
  row.event_id = ev.event_id;
  row.direction = ev.direction;
  row.subset = bundle.subset;
  row.has_video = bundle.has_video;
  row.has_pov = bundle.has_pov;
  row.scenario_label = ev.scenario_label;

  row.screening = screen_event(ev, options.ramp_db.value_or(RampDatabase{}));
  if (options.ramp_db) row.subset = row.screening.subset();
  if (ev.t_lc) row.sv_speed_change = sv_speed_change(ev.channels, *ev.t_lc);

  if (!row.screening.determinate) {
    row.outcome = PipelineOutcome::screening_indeterminate;
    return row;
  }
  if (!row.screening.passes()) {
    row.outcome = PipelineOutcome::screened_out;
    return row;
  }
  if (row.subset == Subset::ramp &&
      !(ev.marker_pattern && options.ramp_marker_patterns.count(*ev.marker_pattern))) {
    row.outcome = PipelineOutcome::excluded_marker_pattern;
    return row;
  }
  if (!bundle.has_video) {
    row.outcome = PipelineOutcome::no_video;
    return row;
  }
  if (!bundle.has_pov || ev.frames.empty()) {
    row.outcome = PipelineOutcome::no_pov;
    return row;
  }

  double w = 0.0;
  try {
    w = reference_lane_width(ev);
  } catch (const Error &) {
    row.outcome = PipelineOutcome::invalid_lane_width;
    return row;
  }

  GapProcessing gp = process_event_gap(ev, cam, w, ev.trailer_length, options.thresholds);
  row.outcome = from_gap_outcome(gp.outcome);
  row.frames_used = gp.result ? gp.result->frames_used : gp.qualified_frames;
  row.gap = std::move(gp.result);
  return row;
}

std::vector<CatalogRow> run_catalog(
  std::span<const EventBundle> bundles, const CameraIntrinsics & cam, const PipelineOptions & options)
{
  validate(cam);
  std::vector<CatalogRow> rows(bundles.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t i = next++; i < bundles.size(); i = next++) {
      try {
        rows[i] = run_pipeline(bundles[i], cam, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
    std::min<std::size_t>(bundles.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto & t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(rows.begin(), rows.end(), [](const CatalogRow & a, const CatalogRow & b) {
    return a.event_id < b.event_id;
  });
  return rows;
}

std::string results_csv_row(const CatalogRow & row)
{
  std::string out = row.event_id;
  out += ',' + std::string(to_string(row.direction));
  out += ',' + std::string(to_string(row.subset));
  out += ',' + std::string(to_string(row.outcome));
  out += ',' + std::to_string(row.frames_used);
  if (row.gap) {
    const GapResult & g = *row.gap;
    out += ',' + format_number(g.range_lc);
    out += ',' + format_number(g.range_rate);
    out += ',' + format_number(g.delta_t);
    out += ',' + opt_number(g.ttc);
    out += ',' + opt_number(g.d_req);
    out += ',' + flag(g.warnings.ttc);
    out += ',' + flag(g.warnings.d_req);
    out += ',' + flag(g.warnings.range);
  } else {
    out += ",,,,,,,,";
  }
  out += ',' + opt_number(row.sv_speed_change);
  return out;
}

std::string results_csv(std::span<const CatalogRow> rows)
{
  std::string out = kResultsHeader;
  out += '\n';
  for (const auto & r : rows) out += results_csv_row(r) + '\n';
  return out;
}

void write_results_csv(std::span<const CatalogRow> rows, const std::filesystem::path & path)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io, "cannot write " + path.string());
  }
  out << results_csv(rows);
  if (!out) {
    throw Error(ErrorCode::io, "short write to " + path.string());
  }
}

std::vector<ResultRecord> parse_results_csv(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::schema, "results file is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) {
    throw Error(ErrorCode::schema, "unexpected results header: " + line);
  }
  const auto columns = split_csv(kResultsHeader);
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto c = split_csv(line);
    if (c.size() != columns.size()) {
      throw Error(ErrorCode::schema, "results row has " + std::to_string(c.size()) + " fields: " + line);
    }
    ResultRecord r;
    r.event_id = c[0];
    const auto dir = parse_direction(c[1]);
    const auto sub = parse_subset(c[2]);
    const auto outcome = parse_outcome(c[3]);
    if (!dir || !sub || !outcome) {
      throw Error(ErrorCode::schema, "bad direction, subset or outcome in row: " + line);
    }
    r.direction = *dir;
    r.subset = *sub;
    r.outcome = *outcome;
    r.frames_used = static_cast<std::size_t>(parse_opt_number(c[4], columns[4]).value_or(0.0));
    r.range_lc = parse_opt_number(c[5], columns[5]);
    r.range_rate = parse_opt_number(c[6], columns[6]);
    r.delta_t = parse_opt_number(c[7], columns[7]);
    r.ttc = parse_opt_number(c[8], columns[8]);
    r.d_req = parse_opt_number(c[9], columns[9]);
    r.ttc_warning = parse_opt_flag(c[10], columns[10]);
    r.d_req_warning = parse_opt_flag(c[11], columns[11]);
    r.range_warning = parse_opt_flag(c[12], columns[12]);
    r.sv_speed_change = parse_opt_number(c[13], columns[13]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResultRecord> read_results_csv(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_results_csv(ss.str());
}

json range_estimate_to_json(const RangeEstimate & e)
{
  return {
    {"t_s", e.t},
    {"status", std::string(to_string(e.status))},
    {"qualified", e.qualified()},
    {"lane_width_normalized", e.lane_width_normalized},
    {"camera_distance_m", e.camera_distance},
    {"range_m", e.range},
  };
}

json overlay_to_json(const Overlay & overlay)
{
  const auto poly = [](const std::vector<PixelPoint> & pts) {
    json arr = json::array();
    for (const auto & p : pts) arr.push_back(json::array({p.u, p.v}));
    return arr;
  };
  return {
    {"left_marker", poly(overlay.left_marker)},
    {"right_marker", poly(overlay.right_marker)},
    {"width_segment", poly(overlay.width_segment)},
  };
}

json gap_result_to_json(const GapResult & g)
{
  json estimates = json::array();
  for (const auto & e : g.estimates) estimates.push_back(range_estimate_to_json(e));
  return {
    {"event_id", g.event_id},
    {"direction", std::string(to_string(g.direction))},
    {"range_lc_m", g.range_lc},
    {"range_rate_mps", g.range_rate},
    {"delta_t_s", g.delta_t},
    {"t_n_s", g.t_n},
    {"frames_used", g.frames_used},
    {"ttc_s", opt_json(g.ttc)},
    {"d_req_mps2", opt_json(g.d_req)},
    {"warnings", {{"ttc", g.warnings.ttc}, {"d_req", g.warnings.d_req}, {"range", g.warnings.range}}},
    {"fit", {{"rate", g.fit.rate}, {"intercept", g.fit.intercept}, {"t_ref", g.fit.t_ref},
             {"level", g.fit.level}, {"n", g.fit.n}, {"weighted_sse", g.fit.weighted_sse}}},
    {"estimates", std::move(estimates)},
  };
}

json catalog_row_to_json(const CatalogRow & row)
{
  json j = {
    {"event_id", row.event_id},
    {"direction", std::string(to_string(row.direction))},
    {"subset", std::string(to_string(row.subset))},
    {"has_video", row.has_video},
    {"has_pov", row.has_pov},
    {"scenario_label", row.scenario_label ? json(*row.scenario_label) : json(nullptr)},
    {"outcome", std::string(to_string(row.outcome))},
    {"frames_used", row.frames_used},
    {"screening", {{"highway", row.screening.highway}, {"straight", row.screening.straight},
                   {"daytime", row.screening.daytime}, {"ramp_region", row.screening.ramp_region},
                   {"determinate", row.screening.determinate}, {"note", row.screening.note}}},
    {"sv_speed_change_mps", opt_json(row.sv_speed_change)},
  };
  j["gap"] = row.gap ? gap_result_to_json(*row.gap) : json(nullptr);
  return j;
}

}  // namespace truckgap
