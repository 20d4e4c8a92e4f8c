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

#include "truckgap/event.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace truckgap
{

struct DistributionSummary
{
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1); zero for a single value
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
};

/// Percentile q in [0, 100] by linear interpolation between closest ranks
/// of the sorted values (position (n - 1) * q / 100).
double percentile(std::span<const double> sorted_values, double q);

DistributionSummary distribution_summary(std::span<const double> values);

struct RegressionReport
{
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double f_stat = 0.0;  // +inf for a perfect fit
  std::pair<int, int> df{1, 0};
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = slope * x + intercept with the one-predictor
/// ANOVA F test; the p-value is the F(1, n - 2) upper tail.
RegressionReport linear_regression_anova(std::span<const double> x, std::span<const double> y);

/// Upper tail of F(d1, d2) at f via the regularized incomplete beta function.
double f_distribution_sf(double f, double d1, double d2);

struct TimedRange
{
  double t = 0.0;      // s
  double range = 0.0;  // m
};

struct RadarComparison
{
  std::size_t n_pairs = 0;
  double mean_err_m = 0.0;
  double std_err_m = 0.0;
  double mean_err_pct = 0.0;
  double std_err_pct = 0.0;
  std::vector<double> errors_m;
  std::vector<double> errors_pct;
};

inline constexpr double kRadarPairWindow = 0.25;  // s

/// Pairs each camera sample with the nearest radar sample within
/// kRadarPairWindow and summarizes camera - radar errors; percent errors use
/// the radar value as the reference.
RadarComparison radar_error_stats(std::span<const TimedRange> camera, std::span<const TimedRange> radar);

struct AppearanceRecord
{
  Direction direction = Direction::left;
  bool has_video = false;
  bool has_pov = false;
};

struct AppearanceRates
{
  std::optional<double> left;
  std::optional<double> right;
};

/// Share of events with video in which a POV is visible, per direction.
AppearanceRates pov_appearance_rate(std::span<const AppearanceRecord> catalog);

}  // namespace truckgap
