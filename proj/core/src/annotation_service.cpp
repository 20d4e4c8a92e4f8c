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

#include "truckgap/annotation_service.hpp"

#include "truckgap/gap_estimator.hpp"
#include "truckgap/trajectory_filter.hpp"

#include "httplib.h"
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

namespace truckgap
{
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

constexpr double kFrameTimeTolerance = 1e-6;  // s

HttpResponse json_response(int status, const json & body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, const std::string & message, json extra = json::object())
{
  extra["error"] = message;
  return json_response(status, extra);
}

std::optional<double> parse_time(const std::string & text)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<PixelPoint> point_at(const json & j)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) return std::nullopt;
  const PixelPoint p{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(p.u) || !std::isfinite(p.v)) return std::nullopt;
  return p;
}

// Collects the five roles from either body layout; missing roles are
// reported in click order.
std::optional<FrameAnnotation> points_from_body(const json & body, std::vector<std::string> & missing)
{
  std::optional<PixelPoint> pts[5];
  const char * roles[5] = {"left1", "left2", "right1", "right2", "pov"};
  for (int k = 0; k < 5; ++k) {
    if (body.contains(roles[k])) pts[k] = point_at(body.at(roles[k]));
  }
  for (int side = 0; side < 2; ++side) {
    const char * key = side == 0 ? "left" : "right";
    if (!body.contains(key) || !body.at(key).is_array()) continue;
    const json & arr = body.at(key);
    for (std::size_t i = 0; i < 2 && i < arr.size(); ++i) {
      if (!pts[2 * side + i]) pts[2 * side + i] = point_at(arr[i]);
    }
  }
  for (int k = 0; k < 5; ++k) {
    if (!pts[k]) missing.emplace_back(roles[k]);
  }
  if (!missing.empty()) return std::nullopt;
  FrameAnnotation fa;
  fa.left_marker = {*pts[0], *pts[1]};
  fa.right_marker = {*pts[2], *pts[3]};
  fa.pov = *pts[4];
  return fa;
}

FrameSlot * find_slot(std::vector<FrameSlot> & slots, double t)
{
  for (auto & s : slots) {
    if (std::abs(s.t - t) <= kFrameTimeTolerance) return &s;
  }
  return nullptr;
}

std::string content_type_for(const fs::path & p)
{
  std::string ext = p.extension().string();
  for (auto & c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".ppm") return "image/x-portable-pixmap";
  return "application/octet-stream";
}

json summary_json(const EventBundle & b)
{
  const LaneChangeEvent & ev = b.event;
  std::size_t annotated = 0;
  for (const auto & s : b.slots) annotated += s.points.has_value();
  return {
    {"event_id", ev.event_id},
    {"direction", std::string(to_string(ev.direction))},
    {"subset", std::string(to_string(b.subset))},
    {"has_video", b.has_video},
    {"has_pov", b.has_pov},
    {"scenario_label", ev.scenario_label ? json(*ev.scenario_label) : json(nullptr)},
    {"frames", b.slots.size()},
    {"annotated_frames", annotated},
  };
}

}  // namespace

AnnotationService::AnnotationService(ServiceConfig config) : config_(std::move(config))
{
  validate(config_.camera);
  config_.thresholds.validate();

  const fs::path probe = config_.catalog_root / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out) {
      throw Error(ErrorCode::io, "catalog root " + config_.catalog_root.string() + " is not writable");
    }
  }
  std::error_code ec;
  fs::remove(probe, ec);

  for (const auto & dir : list_event_dirs(config_.catalog_root)) {
    try {
      const EventBundle b = load_event_bundle(dir);
      const auto [it, inserted] = events_.try_emplace(b.event.event_id);
      if (!inserted) {
        throw Error(ErrorCode::schema, "duplicate event_id " + b.event.event_id + " in " + dir.string() +
                                         " and " + it->second.dir.string());
      }
      it->second.dir = dir;
      it->second.mutex = std::make_unique<std::shared_mutex>();
    } catch (const BundleError & e) {
      spdlog::warn("skipping invalid bundle: {}", e.what());
    }
  }
  spdlog::info("indexed {} event(s) under {}", events_.size(), config_.catalog_root.string());
}

const AnnotationService::Entry * AnnotationService::find(const std::string & id) const
{
  const auto it = events_.find(id);
  return it == events_.end() ? nullptr : &it->second;
}

HttpResponse AnnotationService::health() const
{
  return json_response(200, {{"status", "ok"}, {"events", events_.size()}});
}

HttpResponse AnnotationService::list_events() const
{
  json out = json::array();
  for (const auto & [id, entry] : events_) {
    std::shared_lock lock(*entry.mutex);
    try {
      out.push_back(summary_json(load_event_bundle(entry.dir)));
    } catch (const Error & e) {
      out.push_back({{"event_id", id}, {"error", e.what()}});
    }
  }
  return json_response(200, {{"events", std::move(out)}});
}

HttpResponse AnnotationService::get_event(const std::string & id) const
{
  const Entry * entry = find(id);
  if (!entry) return error_response(404, "unknown event " + id);
  std::shared_lock lock(*entry->mutex);
  const EventBundle b = load_event_bundle(entry->dir);
  const LaneChangeEvent & ev = b.event;
  json body = summary_json(b);
  body["t_start_s"] = ev.t_start;
  body["t_lc_s"] = ev.t_lc ? json(*ev.t_lc) : json(nullptr);
  body["t_end_s"] = ev.t_end;
  body["trailer_length_m"] = ev.trailer_length;
  body["lane_width_m"] = ev.lane_width;
  try {
    body["reference_lane_width_m"] = reference_lane_width(ev);
  } catch (const Error &) {
    body["reference_lane_width_m"] = nullptr;
  }
  body["marker_pattern"] = ev.marker_pattern ? json(*ev.marker_pattern) : json(nullptr);
  body["camera"] = camera_to_json(config_.camera);
  body["annotations"] = annotations_to_json(b.slots).at("frames");
  return json_response(200, body);
}

HttpResponse AnnotationService::get_frame_image(const std::string & id, const std::string & t) const
{
  const Entry * entry = find(id);
  if (!entry) return error_response(404, "unknown event " + id);
  const auto time = parse_time(t);
  if (!time) return error_response(400, "frame time is not a number: " + t);
  std::shared_lock lock(*entry->mutex);
  EventBundle b = load_event_bundle(entry->dir);
  const FrameSlot * slot = find_slot(b.slots, *time);
  if (!slot) return error_response(404, "no frame at t = " + t);
  const fs::path name(slot->image);
  if (slot->image.empty() || name.filename() != name) {
    return error_response(404, "frame has no image file");
  }
  const fs::path path = entry->dir / kFramesDir / name;
  std::ifstream in(path, std::ios::binary);
  if (!in) return error_response(404, "image not found: " + slot->image);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {200, content_type_for(path), ss.str()};
}

HttpResponse AnnotationService::put_points(const std::string & id, const std::string & t, const std::string & body)
{
  const Entry * entry = find(id);
  if (!entry) return error_response(404, "unknown event " + id);
  const auto time = parse_time(t);
  if (!time) return error_response(400, "frame time is not a number: " + t);

  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::parse_error & e) {
    return error_response(400, std::string("malformed JSON: ") + e.what());
  }
  if (!parsed.is_object()) return error_response(400, "body must be a JSON object");
  std::vector<std::string> missing;
  auto fa = points_from_body(parsed, missing);
  if (!fa) {
    std::string msg = "missing or malformed point role(s):";
    for (const auto & r : missing) msg += " " + r;
    return error_response(422, msg, {{"missing_roles", missing}});
  }

  std::unique_lock lock(*entry->mutex);
  EventBundle b = load_event_bundle(entry->dir);
  FrameSlot * slot = find_slot(b.slots, *time);
  if (!slot) return error_response(404, "no frame at t = " + t);
  fa->t = slot->t;
  fa->image_ref = slot->image;

  double w = 0.0;
  try {
    w = reference_lane_width(b.event);
  } catch (const Error & e) {
    return error_response(422, e.what());
  }
  const RangeEstimate est = estimate_frame_range(*fa, config_.camera, w, b.event.trailer_length);
  json overlay = nullptr;
  std::string overlay_error;
  try {
    overlay = overlay_to_json(overlay_segments(*fa, config_.camera));
  } catch (const Error & e) {
    overlay_error = e.what();
  }

  slot->points = *fa;
  save_annotations(b, entry->dir);

  json out = {
    {"event_id", id},
    {"t_s", slot->t},
    {"estimate", range_estimate_to_json(est)},
    {"overlay", std::move(overlay)},
  };
  if (!overlay_error.empty()) out["overlay_error"] = overlay_error;
  return json_response(200, out);
}

HttpResponse AnnotationService::compute(const std::string & id) const
{
  const Entry * entry = find(id);
  if (!entry) return error_response(404, "unknown event " + id);
  std::shared_lock lock(*entry->mutex);
  const EventBundle b = load_event_bundle(entry->dir);
  if (!b.event.t_lc) return error_response(422, "event has no lane-change time");
  double w = 0.0;
  try {
    w = reference_lane_width(b.event);
  } catch (const Error & e) {
    return error_response(422, e.what());
  }
  const GapProcessing gp = process_event_gap(b.event, config_.camera, w, b.event.trailer_length, config_.thresholds);
  return json_response(200, {
    {"event_id", id},
    {"outcome", std::string(to_string(gp.outcome))},
    {"qualified_frames", gp.qualified_frames},
    {"result", gp.result ? gap_result_to_json(*gp.result) : json(nullptr)},
  });
}

void AnnotationService::bind(httplib::Server & server)
{
  const auto send = [](httplib::Response & res, const HttpResponse & r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  const auto guarded = [send](httplib::Response & res, auto && fn) {
    try {
      send(res, fn());
    } catch (const BundleError & e) {
      send(res, error_response(500, e.what()));
    } catch (const Error & e) {
      send(res, error_response(e.code() == ErrorCode::invalid_argument ? 400 : 500, e.what()));
    }
  };

  server.Get("/health", [this, guarded](const httplib::Request &, httplib::Response & res) {
    guarded(res, [&] { return health(); });
  });
  server.Get("/events", [this, guarded](const httplib::Request &, httplib::Response & res) {
    guarded(res, [&] { return list_events(); });
  });
  server.Get(R"(/events/([^/]+))", [this, guarded](const httplib::Request & req, httplib::Response & res) {
    guarded(res, [&] { return get_event(req.matches[1]); });
  });
  server.Get(R"(/events/([^/]+)/frames/([^/]+)/image)",
             [this, guarded](const httplib::Request & req, httplib::Response & res) {
               guarded(res, [&] { return get_frame_image(req.matches[1], req.matches[2]); });
             });
  server.Put(R"(/events/([^/]+)/frames/([^/]+)/points)",
             [this, guarded](const httplib::Request & req, httplib::Response & res) {
               guarded(res, [&] { return put_points(req.matches[1], req.matches[2], req.body); });
             });
  server.Post(R"(/events/([^/]+)/compute)", [this, guarded](const httplib::Request & req, httplib::Response & res) {
    guarded(res, [&] { return compute(req.matches[1]); });
  });
}

void serve(const ServiceConfig & config)
{
  AnnotationService service(config);
  httplib::Server server;
  service.bind(server);
  if (!server.bind_to_port(config.host, config.port)) {
    throw Error(ErrorCode::io, "cannot bind " + config.host + ":" + std::to_string(config.port));
  }
  spdlog::info("serving {} on http://{}:{}", config.catalog_root.string(), config.host, config.port);
  if (!server.listen_after_bind()) {
    throw Error(ErrorCode::io, "server stopped unexpectedly");
  }
}

}  // namespace truckgap
