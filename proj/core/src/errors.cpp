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

#include "truckgap/errors.hpp"

namespace truckgap
{

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::non_finite_input: return "non_finite_input";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::degenerate_annotation: return "degenerate_annotation";
    case ErrorCode::geometry: return "geometry";
    case ErrorCode::singular_design: return "singular_design";
    case ErrorCode::stale_frame: return "stale_frame";
    case ErrorCode::domain: return "domain";
    case ErrorCode::malformed_event: return "malformed_event";
    case ErrorCode::projection: return "projection";
    case ErrorCode::undefined_range: return "undefined_range";
    case ErrorCode::schema: return "schema";
    case ErrorCode::no_overlap: return "no_overlap";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace truckgap
