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

#include "truckgap/bundle_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace truckgap
{
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

std::string read_file(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path & path, const std::string & content)
{
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io, "cannot write " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      throw Error(ErrorCode::io, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::io, "cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s)
{
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<double> parse_number(const std::string & text)
{
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Reads a CSV file whose first line is a header; returns rows of numbers
// keyed by column name. Column order in the file is free.
struct NumericTable
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> index_of(const std::string & name) const
  {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
  }
};

NumericTable read_numeric_csv(
  const fs::path & path, const std::string & field, std::vector<SchemaViolation> & violations)
{
  NumericTable table;
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    violations.push_back({field, "file is empty"});
    return table;
  }
  for (auto & c : split(trim(line), ',')) table.columns.push_back(trim(c));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != table.columns.size()) {
      violations.push_back({field, "line " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " fields, expected " +
                                     std::to_string(table.columns.size())});
      continue;
    }
    std::vector<double> row;
    for (const auto & c : cells) {
      const auto v = parse_number(c);
      if (!v) {
        violations.push_back({field, "line " + std::to_string(line_no) + ": not a number: '" + c + "'"});
        row.push_back(std::nan(""));
      } else {
        row.push_back(*v);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string csv_line(std::initializer_list<double> values)
{
  std::string out;
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_number(v);
    first = false;
  }
  out += '\n';
  return out;
}

json point_json(const PixelPoint & p) { return json::array({p.u, p.v}); }

std::optional<PixelPoint> point_from_json(const json & j)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) return std::nullopt;
  return PixelPoint{j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
std::optional<T> get_opt(const json & j, const char * key)
{
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

UtcTime parse_utc(const std::string & text)
{
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char tail = 0;
  const int got = std::sscanf(text.c_str(), "%d-%u-%uT%u:%u:%lf%c", &y, &mo, &d, &h, &mi, &sec, &tail);
  if (got != 7 || tail != 'Z' || h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0) {
    throw Error(ErrorCode::schema, "invalid UTC timestamp '" + text + "' (expected YYYY-MM-DDTHH:MM:SSZ)");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::schema, "invalid calendar date in '" + text + "'");
  }
  return UtcTime{sys_days{ymd} + hours{h} + minutes{mi} + milliseconds{std::llround(sec * 1000.0)}};
}

std::string format_utc(UtcTime t)
{
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  auto rest = t - day;
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto m = duration_cast<minutes>(rest);
  rest -= m;
  const auto ms = rest.count();
  char buf[40];
  if (ms % 1000 == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(h.count()), static_cast<int>(m.count()),
                  static_cast<long long>(ms / 1000));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02lld.%03lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<long long>(ms / 1000),
                  static_cast<long long>(ms % 1000));
  }
  return buf;
}

std::string format_number(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) {
    throw Error(ErrorCode::invalid_argument, "cannot format number");
  }
  return std::string(buf, ptr);
}

CameraIntrinsics camera_from_json(const json & j)
{
  CameraIntrinsics cam;
  try {
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.image_width = j.at("image_width").get<int>();
    cam.image_height = j.at("image_height").get<int>();
    cam.skew = j.value("skew", 0.0);
    cam.k1 = j.value("k1", 0.0);
    cam.k2 = j.value("k2", 0.0);
    cam.k3 = j.value("k3", 0.0);
    cam.p1 = j.value("p1", 0.0);
    cam.p2 = j.value("p2", 0.0);
    cam.focal_length_mm = j.value("focal_length_mm", 0.0);
  } catch (const json::exception & e) {
    throw Error(ErrorCode::schema, std::string("camera configuration: ") + e.what());
  }
  validate(cam);
  return cam;
}

json camera_to_json(const CameraIntrinsics & cam)
{
  json j = {{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy},
            {"skew", cam.skew}, {"k1", cam.k1}, {"k2", cam.k2}, {"k3", cam.k3},
            {"p1", cam.p1}, {"p2", cam.p2}, {"image_width", cam.image_width},
            {"image_height", cam.image_height}};
  if (cam.focal_length_mm > 0.0) j["focal_length_mm"] = cam.focal_length_mm;
  return j;
}

CameraIntrinsics load_camera(const fs::path & path)
{
  try {
    return camera_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error & e) {
    throw Error(ErrorCode::schema, path.string() + ": " + e.what());
  }
}

WarningThresholds thresholds_from_json(const json & j)
{
  WarningThresholds th;
  try {
    th.ttc_max = j.value("ttc_max_s", th.ttc_max);
    th.d_req_min = j.value("d_req_min_mps2", th.d_req_min);
    th.right_range_min = j.value("right_range_min_m", th.right_range_min);
  } catch (const json::exception & e) {
    throw Error(ErrorCode::schema, std::string("thresholds: ") + e.what());
  }
  th.validate();
  return th;
}

WarningThresholds load_thresholds(const fs::path & path)
{
  try {
    return thresholds_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error & e) {
    throw Error(ErrorCode::schema, path.string() + ": " + e.what());
  }
}

RampDatabase load_ramp_database(const fs::path & path)
{
  RampDatabase db;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    std::optional<double> lat, lon;
    if (cells.size() == 2) {
      lat = parse_number(cells[0]);
      lon = parse_number(cells[1]);
    }
    if (!lat || !lon || std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) {
      throw Error(ErrorCode::schema, path.string() + ":" + std::to_string(line_no) +
                                       ": expected 'lat,lon' in decimal degrees");
    }
    db.points.push_back({*lat, *lon});
  }
  return db;
}

void EventBundle::sync_frames()
{
  event.frames.clear();
  for (const auto & slot : slots) {
    if (slot.points) event.frames.push_back(*slot.points);
  }
}

BundleError::BundleError(fs::path path, std::vector<SchemaViolation> violations)
: Error(ErrorCode::schema,
        [&] {
          std::string msg = path.string() + ": " + std::to_string(violations.size()) + " schema violation(s)";
          for (const auto & v : violations) msg += "\n  " + v.field + ": " + v.message;
          return msg;
        }()),
  violations_(std::move(violations))
{
}

EventBundle make_synthetic_bundle(const SyntheticEvent & sim, const SyntheticScene & scene)
{
  EventBundle b;
  b.event = sim.event;
  b.subset = Subset::non_ramp;
  b.has_video = true;
  b.has_pov = !sim.event.frames.empty();
  for (const auto & f : sim.event.frames) b.slots.push_back({f.t, f.image_ref, f});
  b.ground_truth = json{
    {"range_lc_m", sim.true_range_lc},
    {"range_rate_mps", sim.true_range_rate},
    {"ranges_m", sim.true_ranges},
    {"lane_width_m", scene.lane_width},
    {"lane_center_offset_m", scene.lane_center_offset},
    {"camera_height_m", scene.pose.height},
    {"pitch_deg", scene.pose.pitch},
    {"roll_deg", scene.pose.roll},
    {"yaw_deg", scene.pose.yaw},
    {"pixel_noise_sigma_px", scene.pixel_noise_sigma},
    {"seed", scene.seed},
    {"camera", camera_to_json(scene.cam)},
  };
  return b;
}

std::vector<fs::path> list_event_dirs(const fs::path & root)
{
  std::vector<fs::path> dirs;
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::io, "catalog root " + root.string() + " is not a directory");
  }
  for (const auto & entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / kMetadataFile)) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

EventBundle load_event_bundle(const fs::path & dir)
{
  std::vector<SchemaViolation> violations;
  EventBundle b;
  b.root = dir;

  if (!fs::is_directory(dir)) {
    throw BundleError(dir, {{"path", "not a directory"}});
  }

  // Metadata.
  json meta;
  try {
    meta = json::parse(read_file(dir / kMetadataFile));
  } catch (const json::parse_error & e) {
    throw BundleError(dir, {{kMetadataFile, e.what()}});
  } catch (const Error & e) {
    throw BundleError(dir, {{kMetadataFile, e.what()}});
  }

  auto require_number = [&](const char * key) -> double {
    if (!meta.contains(key)) {
      violations.push_back({key, "required field is missing"});
      return std::nan("");
    }
    if (!meta.at(key).is_number()) {
      violations.push_back({key, "must be a number"});
      return std::nan("");
    }
    return meta.at(key).get<double>();
  };
  auto require_string = [&](const char * key) -> std::string {
    if (!meta.contains(key)) {
      violations.push_back({key, "required field is missing"});
      return {};
    }
    if (!meta.at(key).is_string()) {
      violations.push_back({key, "must be a string"});
      return {};
    }
    return meta.at(key).get<std::string>();
  };

  LaneChangeEvent & ev = b.event;
  ev.event_id = require_string("event_id");
  const std::string direction = require_string("direction");
  if (!direction.empty()) {
    if (auto d = parse_direction(direction)) {
      ev.direction = *d;
    } else {
      violations.push_back({"direction", "must be 'left' or 'right'"});
    }
  }
  if (meta.contains("t_lc_s") && meta.at("t_lc_s").is_null()) {
    violations.push_back({"t_lc_s", "required field is null"});
  } else if (const double t_lc = require_number("t_lc_s"); std::isfinite(t_lc)) {
    ev.t_lc = t_lc;
  }
  ev.t_start = require_number("t_start_s");
  ev.t_end = require_number("t_end_s");
  ev.trailer_length = require_number("trailer_length_m");
  ev.lane_width = require_number("lane_width_m");
  if (ev.t_lc && std::isfinite(ev.t_start) && std::isfinite(ev.t_end) &&
      !(ev.t_start < *ev.t_lc && *ev.t_lc < ev.t_end)) {
    violations.push_back({"t_lc_s", "must satisfy t_start_s < t_lc_s < t_end_s"});
  }
  if (std::isfinite(ev.trailer_length) && ev.trailer_length < 0.0) {
    violations.push_back({"trailer_length_m", "must be non-negative"});
  }
  if (std::isfinite(ev.lane_width) && !(ev.lane_width > 0.0)) {
    violations.push_back({"lane_width_m", "must be positive"});
  }
  const std::string subset = require_string("subset");
  if (!subset.empty()) {
    if (auto s = parse_subset(subset)) {
      b.subset = *s;
    } else {
      violations.push_back({"subset", "must be 'ramp' or 'non-ramp'"});
    }
  }
  const std::string anchor = require_string("utc_anchor");
  if (!anchor.empty()) {
    try {
      ev.channels.utc_anchor = parse_utc(anchor);
    } catch (const Error & e) {
      violations.push_back({"utc_anchor", e.what()});
    }
  }
  try {
    ev.scenario_label = get_opt<std::string>(meta, "scenario_label");
    ev.marker_pattern = get_opt<std::string>(meta, "marker_pattern");
  } catch (const json::exception &) {
    violations.push_back({"scenario_label/marker_pattern", "must be strings"});
  }
  if (meta.contains("ground_truth")) b.ground_truth = meta.at("ground_truth");

  // Channels.
  if (!fs::exists(dir / kChannelsFile)) {
    violations.push_back({kChannelsFile, "required file is missing"});
  } else {
    const NumericTable tab = read_numeric_csv(dir / kChannelsFile, kChannelsFile, violations);
    const char * required[] = {"t_s", "speed_mps", "heading_deg", "lane_offset_m", "lat_deg", "lon_deg"};
    bool complete = true;
    for (const char * col : required) {
      if (!tab.index_of(col)) {
        violations.push_back({kChannelsFile, std::string("missing column ") + col});
        complete = false;
      }
    }
    if (complete) {
      ChannelSeries & ch = ev.channels;
      const auto width_col = tab.index_of("lane_width_m");
      for (const auto & row : tab.rows) {
        ch.t.push_back(row[*tab.index_of("t_s")]);
        ch.speed.push_back(row[*tab.index_of("speed_mps")]);
        ch.heading.push_back(row[*tab.index_of("heading_deg")]);
        ch.lane_offset.push_back(row[*tab.index_of("lane_offset_m")]);
        ch.lat.push_back(row[*tab.index_of("lat_deg")]);
        ch.lon.push_back(row[*tab.index_of("lon_deg")]);
        if (width_col) ch.lane_width.push_back(row[*width_col]);
      }
      try {
        ch.validate();
      } catch (const Error & e) {
        violations.push_back({kChannelsFile, e.what()});
      }
    }
  }

  // Frames.
  const fs::path frames_dir = dir / kFramesDir;
  const fs::path ann_path = frames_dir / kAnnotationsFile;
  if (fs::exists(ann_path)) {
    json ann;
    try {
      ann = json::parse(read_file(ann_path));
    } catch (const json::parse_error & e) {
      violations.push_back({kAnnotationsFile, e.what()});
    }
    if (!ann.is_null()) {
      if (!ann.contains("frames") || !ann.at("frames").is_array()) {
        violations.push_back({"frames", "annotations file needs a 'frames' array"});
      } else {
        std::size_t i = 0;
        for (const auto & f : ann.at("frames")) {
          const std::string where = "frames[" + std::to_string(i++) + "]";
          FrameSlot slot;
          if (!f.contains("t_s") || !f.at("t_s").is_number()) {
            violations.push_back({where + ".t_s", "required number is missing"});
            continue;
          }
          slot.t = f.at("t_s").get<double>();
          if (f.contains("image") && f.at("image").is_string()) slot.image = f.at("image").get<std::string>();

          const bool any_role = f.contains("left") || f.contains("right") || f.contains("pov");
          if (any_role) {
            FrameAnnotation fa;
            fa.t = slot.t;
            fa.image_ref = slot.image;
            bool ok = true;
            for (const char * role : {"left", "right"}) {
              const json * pts = f.contains(role) ? &f.at(role) : nullptr;
              auto & dst = std::string_view(role) == "left" ? fa.left_marker : fa.right_marker;
              for (int k = 0; k < 2; ++k) {
                std::optional<PixelPoint> p;
                if (pts && pts->is_array() && pts->size() > static_cast<std::size_t>(k)) {
                  p = point_from_json((*pts)[k]);
                }
                if (!p) {
                  violations.push_back({where + "." + role + std::to_string(k + 1), "missing or malformed point"});
                  ok = false;
                } else {
                  dst[k] = *p;
                }
              }
            }
            const auto pov = f.contains("pov") ? point_from_json(f.at("pov")) : std::nullopt;
            if (!pov) {
              violations.push_back({where + ".pov", "missing or malformed point"});
              ok = false;
            } else {
              fa.pov = *pov;
            }
            if (ok) slot.points = fa;
          }
          b.slots.push_back(std::move(slot));
        }
        for (std::size_t k = 1; k < b.slots.size(); ++k) {
          if (b.slots[k].t == b.slots[k - 1].t) {
            violations.push_back({"frames", "duplicate frame timestamp " + format_number(b.slots[k].t)});
          } else if (b.slots[k].t < b.slots[k - 1].t) {
            violations.push_back({"frames", "frames are not sorted by t_s"});
          }
        }
      }
    }
  }
  b.sync_frames();
  b.has_video = meta.value("has_video", !b.slots.empty() || fs::is_directory(frames_dir));
  b.has_pov = meta.value("has_pov", !b.event.frames.empty());

  // Radar.
  if (fs::exists(dir / kRadarFile)) {
    const NumericTable tab = read_numeric_csv(dir / kRadarFile, kRadarFile, violations);
    const auto t_col = tab.index_of("t_s");
    const auto r_col = tab.index_of("range_m");
    if (!t_col || !r_col) {
      violations.push_back({kRadarFile, "needs columns t_s and range_m"});
    } else {
      for (const auto & row : tab.rows) b.radar.push_back({row[*t_col], row[*r_col]});
    }
  }

  if (!violations.empty()) {
    throw BundleError(dir, std::move(violations));
  }
  return b;
}

json annotations_to_json(const std::vector<FrameSlot> & slots)
{
  json frames = json::array();
  for (const auto & slot : slots) {
    json f = {{"t_s", slot.t}, {"image", slot.image}};
    if (slot.points) {
      f["left"] = json::array({point_json(slot.points->left_marker[0]), point_json(slot.points->left_marker[1])});
      f["right"] = json::array({point_json(slot.points->right_marker[0]), point_json(slot.points->right_marker[1])});
      f["pov"] = point_json(slot.points->pov);
    }
    frames.push_back(std::move(f));
  }
  return json{{"frames", std::move(frames)}};
}

void save_annotations(const EventBundle & bundle, const fs::path & dir)
{
  fs::create_directories(dir / kFramesDir);
  write_file_atomic(dir / kFramesDir / kAnnotationsFile, annotations_to_json(bundle.slots).dump(2) + "\n");
}

void save_event_bundle(const EventBundle & bundle, const fs::path & dir)
{
  fs::create_directories(dir);
  const LaneChangeEvent & ev = bundle.event;

  json meta = {
    {"event_id", ev.event_id},
    {"direction", std::string(to_string(ev.direction))},
    {"t_start_s", ev.t_start},
    {"t_end_s", ev.t_end},
    {"trailer_length_m", ev.trailer_length},
    {"lane_width_m", ev.lane_width},
    {"subset", std::string(to_string(bundle.subset))},
    {"utc_anchor", format_utc(ev.channels.utc_anchor)},
    {"has_video", bundle.has_video},
    {"has_pov", bundle.has_pov},
  };
  meta["t_lc_s"] = ev.t_lc ? json(*ev.t_lc) : json(nullptr);
  if (ev.scenario_label) meta["scenario_label"] = *ev.scenario_label;
  if (ev.marker_pattern) meta["marker_pattern"] = *ev.marker_pattern;
  if (bundle.ground_truth) meta["ground_truth"] = *bundle.ground_truth;
  write_file_atomic(dir / kMetadataFile, meta.dump(2) + "\n");

  const ChannelSeries & ch = ev.channels;
  std::string csv = "t_s,speed_mps,heading_deg,lane_offset_m,lat_deg,lon_deg";
  csv += ch.has_lane_width() ? ",lane_width_m\n" : "\n";
  for (std::size_t i = 0; i < ch.size(); ++i) {
    std::string line = csv_line({ch.t[i], ch.speed[i], ch.heading[i], ch.lane_offset[i], ch.lat[i], ch.lon[i]});
    if (ch.has_lane_width()) {
      line.pop_back();
      line += "," + format_number(ch.lane_width[i]) + "\n";
    }
    csv += line;
  }
  write_file_atomic(dir / kChannelsFile, csv);

  if (bundle.has_video || !bundle.slots.empty()) {
    save_annotations(bundle, dir);
  }

  if (!bundle.radar.empty()) {
    std::string radar = "t_s,range_m\n";
    for (const auto & r : bundle.radar) radar += csv_line({r.t, r.range});
    write_file_atomic(dir / kRadarFile, radar);
  }
}

}  // namespace truckgap
