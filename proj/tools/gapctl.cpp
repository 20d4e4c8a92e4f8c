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

// gapctl: batch estimation, screening, simulation and the annotation service.

#include "truckgap/analysis_stats.hpp"
#include "truckgap/annotation_service.hpp"
#include "truckgap/bundle_io.hpp"
#include "truckgap/pipeline.hpp"
#include "truckgap/synthetic_oracle.hpp"

#include "CLI11.hpp"
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace truckgap;

namespace
{

constexpr double kRadarMaxRange = 33.0;  // m, rearward radar coverage

struct CommonOptions
{
  std::vector<std::string> inputs;
  std::string camera;
  std::string thresholds;
  std::string ramp_db;
  std::string out;
  std::uint64_t seed = 1;
};

// Expands each input into event directories: a directory holding event.json
// is itself a bundle, any other directory is treated as a catalog root.
std::vector<fs::path> expand_inputs(const std::vector<std::string> & inputs)
{
  std::vector<fs::path> dirs;
  for (const auto & in : inputs) {
    const fs::path p(in);
    if (fs::exists(p / kMetadataFile)) {
      dirs.push_back(p);
    } else if (fs::is_directory(p)) {
      for (auto & d : list_event_dirs(p)) dirs.push_back(std::move(d));
    } else {
      throw Error(ErrorCode::io, in + " is neither an event bundle nor a catalog directory");
    }
  }
  return dirs;
}

// Loads every bundle it can; schema failures are reported and counted.
std::vector<EventBundle> load_all(const std::vector<std::string> & inputs, int & failures)
{
  std::vector<EventBundle> bundles;
  for (const auto & dir : expand_inputs(inputs)) {
    try {
      bundles.push_back(load_event_bundle(dir));
    } catch (const BundleError & e) {
      ++failures;
      std::cerr << "invalid bundle " << e.what() << "\n";
    }
  }
  return bundles;
}

void emit(const std::string & text, const std::string & out)
{
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io, "cannot write " + out);
  f << text;
}

PipelineOptions pipeline_options(const CommonOptions & o)
{
  PipelineOptions opts;
  if (!o.thresholds.empty()) opts.thresholds = load_thresholds(o.thresholds);
  if (!o.ramp_db.empty()) opts.ramp_db = load_ramp_database(o.ramp_db);
  return opts;
}

std::string bool01(bool b) { return b ? "1" : "0"; }

std::string fmt(double v, int precision = 4)
{
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

int cmd_estimate(const CommonOptions & o)
{
  int failures = 0;
  const auto bundles = load_all(o.inputs, failures);
  const CameraIntrinsics cam = load_camera(o.camera);
  const auto rows = run_catalog(bundles, cam, pipeline_options(o));
  emit(results_csv(rows), o.out);
  return failures ? 2 : 0;
}

int cmd_screen(const CommonOptions & o)
{
  int failures = 0;
  const auto bundles = load_all(o.inputs, failures);
  const RampDatabase db = o.ramp_db.empty() ? RampDatabase{} : load_ramp_database(o.ramp_db);
  std::vector<std::pair<std::string, ScreeningResult>> results;
  for (const auto & b : bundles) results.emplace_back(b.event.event_id, screen_event(b.event, db));
  std::sort(results.begin(), results.end(), [](const auto & a, const auto & b) { return a.first < b.first; });

  std::string text = "event_id,highway,straight,daytime,ramp_region,determinate,passes,subset\n";
  for (const auto & [id, r] : results) {
    text += id + "," + bool01(r.highway) + "," + bool01(r.straight) + "," + bool01(r.daytime) + "," +
            bool01(r.ramp_region) + "," + bool01(r.determinate) + "," + bool01(r.passes()) + "," +
            std::string(to_string(r.subset())) + "\n";
  }
  emit(text, o.out);
  return failures ? 2 : 0;
}

struct SimulateOptions
{
  int count = 1;
  double noise = 0.0;
  double initial_range = 40.0;
  double range_rate = -1.5;
  int frames = 10;
  std::string direction = "left";
  double trailer_length = 0.0;
  double lane_change_gap = 0.3;
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;
  double radar_period = 0.1;
};

int cmd_simulate(const CommonOptions & o, const SimulateOptions & s)
{
  if (o.out.empty()) throw Error(ErrorCode::invalid_argument, "simulate needs --out <directory>");
  const auto direction = parse_direction(s.direction);
  if (!direction) throw Error(ErrorCode::invalid_argument, "direction must be left or right");

  const fs::path root(o.out);
  fs::create_directories(root);
  SyntheticScene scene;
  scene.trailer_length = s.trailer_length;
  scene.pixel_noise_sigma = s.noise;
  scene.pose = CameraPose::from_angles(kDefaultCameraHeight, s.pitch, s.roll, s.yaw);
  emit(camera_to_json(scene.cam).dump(2) + "\n", (root / "camera.json").string());

  for (int k = 0; k < s.count; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "sim-%04d", k + 1);
    EventSpec spec;
    spec.event_id = id;
    spec.direction = *direction;
    spec.initial_range = s.initial_range;
    spec.range_rate = s.range_rate;
    spec.n_frames = s.frames;
    spec.lane_change_gap = s.lane_change_gap;
    scene.seed = derive_seed(o.seed, static_cast<std::uint64_t>(k));

    const SyntheticEvent sim = synthesize_event(spec, scene);
    EventBundle b = make_synthetic_bundle(sim, scene);
    // Radar sees the camera-to-POV distance inside its coverage.
    const double t_first = sim.event.frames.front().t;
    if (s.radar_period > 0.0) {
      for (double t = t_first; t <= *sim.event.t_lc + 1e-9; t += s.radar_period) {
        const double z = s.trailer_length + s.initial_range + s.range_rate * (t - t_first);
        if (z > 0.0 && z <= kRadarMaxRange) b.radar.push_back({std::round(t * 1e6) / 1e6, z});
      }
    }
    save_event_bundle(b, root / id);
  }
  spdlog::info("wrote {} synthetic event(s) to {}", s.count, root.string());
  return 0;
}

int cmd_compare_radar(const CommonOptions & o)
{
  int failures = 0;
  const auto bundles = load_all(o.inputs, failures);
  const CameraIntrinsics cam = load_camera(o.camera);

  std::vector<double> err_m, err_pct;
  std::string pairs = "event_id,n_pairs,mean_err_m,std_err_m,mean_err_pct,std_err_pct\n";
  for (const auto & b : bundles) {
    std::vector<TimedRange> radar;
    for (const auto & r : b.radar) {
      if (r.range > 0.0 && r.range <= kRadarMaxRange) radar.push_back(r);
    }
    if (radar.empty()) continue;
    // Device-to-POV distances: trailer length is left out on purpose.
    const double w = reference_lane_width(b.event);
    std::vector<TimedRange> camera;
    for (const auto & f : b.event.frames) {
      const RangeEstimate e = estimate_frame_range(f, cam, w, 0.0);
      if (e.qualified()) camera.push_back({e.t, e.camera_distance});
    }
    if (camera.empty()) continue;
    try {
      const RadarComparison c = radar_error_stats(camera, radar);
      pairs += b.event.event_id + "," + std::to_string(c.n_pairs) + "," + fmt(c.mean_err_m) + "," +
               fmt(c.std_err_m) + "," + fmt(c.mean_err_pct) + "," + fmt(c.std_err_pct) + "\n";
      err_m.insert(err_m.end(), c.errors_m.begin(), c.errors_m.end());
      err_pct.insert(err_pct.end(), c.errors_pct.begin(), c.errors_pct.end());
    } catch (const Error & e) {
      if (e.code() != ErrorCode::no_overlap) throw;
    }
  }
  if (err_m.empty()) throw Error(ErrorCode::no_overlap, "no camera frame pairs with a radar sample");
  const auto sm = distribution_summary(err_m);
  const auto sp = distribution_summary(err_pct);
  pairs += "ALL," + std::to_string(sm.n) + "," + fmt(sm.mean) + "," + fmt(sm.std) + "," + fmt(sp.mean) + "," +
           fmt(sp.std) + "\n";
  emit(pairs, o.out);
  return failures ? 2 : 0;
}

int cmd_stats(const CommonOptions & o)
{
  std::vector<ResultRecord> records;
  for (const auto & in : o.inputs) {
    auto part = read_results_csv(in);
    records.insert(records.end(), part.begin(), part.end());
  }
  std::ostringstream out;
  std::map<std::string, int> outcomes;
  std::vector<AppearanceRecord> appearance;
  for (const auto & r : records) {
    ++outcomes[std::string(to_string(r.outcome))];
    // Rows that reached the video check tell us whether a POV was visible.
    if (r.outcome != PipelineOutcome::screened_out && r.outcome != PipelineOutcome::screening_indeterminate &&
        r.outcome != PipelineOutcome::excluded_marker_pattern && r.outcome != PipelineOutcome::no_video) {
      appearance.push_back({r.direction, true, r.outcome != PipelineOutcome::no_pov});
    }
  }
  out << "events: " << records.size() << "\n";
  for (const auto & [name, count] : outcomes) out << "  " << name << ": " << count << "\n";
  const AppearanceRates rates = pov_appearance_rate(appearance);
  out << "pov appearance rate: left " << (rates.left ? fmt(*rates.left, 3) : "undefined") << ", right "
      << (rates.right ? fmt(*rates.right, 3) : "undefined") << "\n";

  for (Direction d : {Direction::left, Direction::right}) {
    std::vector<double> r_lc, rdot, ttc, d_req, dv;
    for (const auto & r : records) {
      if (r.direction != d || !r.range_lc) continue;
      r_lc.push_back(*r.range_lc);
      rdot.push_back(*r.range_rate);
      if (r.ttc && *r.ttc > 0.0) ttc.push_back(*r.ttc);
      if (r.d_req) d_req.push_back(*r.d_req);
      if (r.sv_speed_change) dv.push_back(*r.sv_speed_change);
    }
    out << "\n[" << to_string(d) << "] events with a gap estimate: " << r_lc.size() << "\n";
    const auto line = [&](const char * name, const std::vector<double> & v) {
      if (v.empty()) return;
      const auto s = distribution_summary(v);
      out << "  " << name << ": n=" << s.n << " mean=" << fmt(s.mean) << " std=" << fmt(s.std)
          << " p10=" << fmt(s.p10) << " p50=" << fmt(s.p50) << " p90=" << fmt(s.p90) << "\n";
    };
    line("R_lc_m", r_lc);
    line("rdot_mps", rdot);
    line("ttc_s (closing)", ttc);
    line("d_req_mps2", d_req);
    line("sv_speed_change_mps", dv);
    if (r_lc.size() >= 3) {
      try {
        const auto reg = linear_regression_anova(rdot, r_lc);
        out << "  regression R_lc ~ rdot: slope=" << fmt(reg.slope) << " intercept=" << fmt(reg.intercept)
            << " adj_r2=" << fmt(reg.adjusted_r2) << " F(" << reg.df.first << ", " << reg.df.second
            << ")=" << fmt(reg.f_stat, 3) << " p=" << fmt(reg.p_value, 4) << "\n";
      } catch (const Error & e) {
        out << "  regression unavailable: " << e.what() << "\n";
      }
    }
  }
  emit(out.str(), o.out);
  return 0;
}

int cmd_serve(const CommonOptions & o, const std::string & host, int port)
{
  ServiceConfig cfg;
  cfg.catalog_root = o.inputs.at(0);
  cfg.host = host;
  cfg.port = port;
  cfg.camera = load_camera(o.camera);
  if (!o.thresholds.empty()) cfg.thresholds = load_thresholds(o.thresholds);
  serve(cfg);
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  spdlog::set_default_logger(spdlog::stderr_color_mt("gapctl"));
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Rearward gap estimation for truck lane changes"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  CommonOptions o;
  SimulateOptions sim;
  std::string host = "127.0.0.1";
  int port = 8080;

  auto * estimate = app.add_subcommand("estimate", "Screen and estimate gaps; writes the results CSV");
  estimate->add_option("bundles", o.inputs, "Event bundles or catalog directories")->required();
  estimate->add_option("--camera", o.camera, "Camera intrinsics JSON")->required()->check(CLI::ExistingFile);
  estimate->add_option("--thresholds", o.thresholds, "Warning thresholds JSON")->check(CLI::ExistingFile);
  estimate->add_option("--ramp-db", o.ramp_db, "Ramp points, one lat,lon per line")->check(CLI::ExistingFile);
  estimate->add_option("--out", o.out, "Results CSV (default stdout)");

  auto * screen = app.add_subcommand("screen", "Report the screening criteria per event");
  screen->add_option("bundles", o.inputs, "Event bundles or catalog directories")->required();
  screen->add_option("--ramp-db", o.ramp_db, "Ramp points, one lat,lon per line")->check(CLI::ExistingFile);
  screen->add_option("--out", o.out, "Output CSV (default stdout)");

  auto * simulate = app.add_subcommand("simulate", "Write synthetic event bundles with known ground truth");
  simulate->add_option("--out", o.out, "Catalog directory to create")->required();
  simulate->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  simulate->add_option("--count", sim.count, "Number of events")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--noise", sim.noise, "Pixel noise sigma, px")->capture_default_str();
  simulate->add_option("--initial-range", sim.initial_range, "Range at the first frame, m")->capture_default_str();
  simulate->add_option("--range-rate", sim.range_rate, "Range rate, m/s")->capture_default_str();
  simulate->add_option("--frames", sim.frames, "Frames per event (2 Hz)")->capture_default_str();
  simulate->add_option("--direction", sim.direction, "left or right")->capture_default_str();
  simulate->add_option("--trailer-length", sim.trailer_length, "Camera to trailer rear, m")->capture_default_str();
  simulate->add_option("--lane-change-gap", sim.lane_change_gap, "t_lc minus last frame time, s")->capture_default_str();
  simulate->add_option("--pitch", sim.pitch, "Camera pitch, deg")->capture_default_str();
  simulate->add_option("--roll", sim.roll, "Camera roll, deg")->capture_default_str();
  simulate->add_option("--yaw", sim.yaw, "Camera yaw, deg")->capture_default_str();
  simulate->add_option("--radar-period", sim.radar_period, "Radar sample period, s (0 disables)")->capture_default_str();

  auto * radar = app.add_subcommand("compare-radar", "Camera-to-POV distance against rearward radar");
  radar->add_option("bundles", o.inputs, "Event bundles or catalog directories")->required();
  radar->add_option("--camera", o.camera, "Camera intrinsics JSON")->required()->check(CLI::ExistingFile);
  radar->add_option("--out", o.out, "Output CSV (default stdout)");

  auto * stats = app.add_subcommand("stats", "Summaries and regression over results CSVs");
  stats->add_option("results", o.inputs, "Results CSV files")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", o.out, "Report file (default stdout)");

  auto * serve_cmd = app.add_subcommand("serve", "HTTP service for the annotation client");
  serve_cmd->add_option("catalog", o.inputs, "Catalog directory")->required()->expected(1)->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--camera", o.camera, "Camera intrinsics JSON")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--thresholds", o.thresholds, "Warning thresholds JSON")->check(CLI::ExistingFile);
  serve_cmd->add_option("--host", host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", port, "Listen port")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (estimate->parsed()) return cmd_estimate(o);
    if (screen->parsed()) return cmd_screen(o);
    if (simulate->parsed()) return cmd_simulate(o, sim);
    if (radar->parsed()) return cmd_compare_radar(o);
    if (stats->parsed()) return cmd_stats(o);
    if (serve_cmd->parsed()) return cmd_serve(o, host, port);
  } catch (const Error & e) {
    spdlog::error("{} ({})", e.what(), to_string(e.code()));
    return 1;
  } catch (const std::exception & e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
