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
#include "truckgap/pipeline.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib
{
class Server;
}

namespace truckgap
{

struct ServiceConfig
{
  std::filesystem::path catalog_root;
  std::string host = "127.0.0.1";
  int port = 8080;
  CameraIntrinsics camera;
  WarningThresholds thresholds;
};

struct HttpResponse
{
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Request handlers for the annotation workflow, independent of the HTTP
/// transport so they can be called directly.
class AnnotationService
{
public:
  /// Indexes the catalog. Throws Error(io) when the root is not writable
  /// and Error(schema) on duplicate event ids.
  explicit AnnotationService(ServiceConfig config);

  HttpResponse health() const;
  HttpResponse list_events() const;
  HttpResponse get_event(const std::string & id) const;
  HttpResponse get_frame_image(const std::string & id, const std::string & t) const;
  /// Body: {"left":[[u,v],[u,v]],"right":[[u,v],[u,v]],"pov":[u,v]} or the
  /// flat roles left1, left2, right1, right2, pov.
  HttpResponse put_points(const std::string & id, const std::string & t, const std::string & body);
  HttpResponse compute(const std::string & id) const;

  void bind(httplib::Server & server);

  const ServiceConfig & config() const { return config_; }

private:
  struct Entry
  {
    std::filesystem::path dir;
    std::unique_ptr<std::shared_mutex> mutex;
  };

  const Entry * find(const std::string & id) const;

  ServiceConfig config_;
  std::map<std::string, Entry> events_;
};

/// Blocks serving HTTP until the process is stopped. Throws Error(io) when
/// the port cannot be bound.
void serve(const ServiceConfig & config);

}  // namespace truckgap
