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

#include "truckgap/analysis_stats.hpp"

#include "truckgap/errors.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace truckgap
{
namespace
{

struct MeanStd
{
  double mean;
  double std;
};

MeanStd mean_std(std::span<const double> v)
{
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return {mean, std};
}

}  // namespace

double percentile(std::span<const double> sorted_values, double q)
{
  if (sorted_values.empty()) {
    throw Error(ErrorCode::empty_input, "percentile of an empty sample");
  }
  if (!(q >= 0.0 && q <= 100.0)) {
    throw Error(ErrorCode::invalid_argument, "percentile must lie in [0, 100]");
  }
  const double pos = (sorted_values.size() - 1) * q / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

DistributionSummary distribution_summary(std::span<const double> values)
{
  if (values.empty()) {
    throw Error(ErrorCode::empty_input, "distribution_summary: no values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const MeanStd ms = mean_std(values);
  return {values.size(), ms.mean, ms.std, percentile(sorted, 10.0), percentile(sorted, 50.0),
          percentile(sorted, 90.0)};
}

double f_distribution_sf(double f, double d1, double d2)
{
  if (std::isinf(f)) return 0.0;
  if (!(f > 0.0)) return 1.0;
  // P(F > f) = I_{d2 / (d2 + d1 f)}(d2 / 2, d1 / 2)
  return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

RegressionReport linear_regression_anova(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size()) {
    throw Error(ErrorCode::length_mismatch, "linear_regression_anova: x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 3) {
    throw Error(ErrorCode::invalid_argument, "linear_regression_anova: need at least three points");
  }
  const MeanStd mx = mean_std(x);
  const MeanStd my = mean_std(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx.mean;
    const double dy = y[i] - my.mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::singular_design, "linear_regression_anova: x is constant");
  }

  RegressionReport rep;
  rep.n = n;
  rep.slope = sxy / sxx;
  rep.intercept = my.mean - rep.slope * mx.mean;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (rep.slope * x[i] + rep.intercept);
    sse += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  rep.df = {1, static_cast<int>(n - 2)};
  // Constant y: nothing to explain; treat as r2 = 0.
  rep.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 0.0;
  rep.adjusted_r2 = 1.0 - (1.0 - rep.r2) * static_cast<double>(n - 1) / dof;
  if (rep.r2 >= 1.0 || sse <= std::numeric_limits<double>::epsilon() * syy) {
    rep.r2 = 1.0;
    rep.adjusted_r2 = 1.0;
    rep.f_stat = std::numeric_limits<double>::infinity();
    rep.p_value = 0.0;
  } else {
    rep.f_stat = rep.r2 / (1.0 - rep.r2) * dof;
    rep.p_value = f_distribution_sf(rep.f_stat, 1.0, dof);
  }
  return rep;
}

RadarComparison radar_error_stats(std::span<const TimedRange> camera, std::span<const TimedRange> radar)
{
  if (camera.empty() || radar.empty()) {
    throw Error(ErrorCode::empty_input, "radar_error_stats: both series must be non-empty");
  }
  RadarComparison out;
  for (const auto & c : camera) {
    const TimedRange * best = nullptr;
    double best_dt = std::numeric_limits<double>::infinity();
    for (const auto & r : radar) {
      const double dt = std::abs(r.t - c.t);
      if (dt < best_dt) {
        best_dt = dt;
        best = &r;
      }
    }
    if (best && best_dt <= kRadarPairWindow) {
      const double err = c.range - best->range;
      out.errors_m.push_back(err);
      out.errors_pct.push_back(err / best->range * 100.0);
    }
  }
  if (out.errors_m.empty()) {
    throw Error(ErrorCode::no_overlap, "radar_error_stats: no camera sample has a radar match");
  }
  out.n_pairs = out.errors_m.size();
  const MeanStd m = mean_std(out.errors_m);
  const MeanStd p = mean_std(out.errors_pct);
  out.mean_err_m = m.mean;
  out.std_err_m = m.std;
  out.mean_err_pct = p.mean;
  out.std_err_pct = p.std;
  return out;
}

AppearanceRates pov_appearance_rate(std::span<const AppearanceRecord> catalog)
{
  std::size_t video[2] = {0, 0};
  std::size_t pov[2] = {0, 0};
  for (const auto & rec : catalog) {
    const int d = rec.direction == Direction::left ? 0 : 1;
    if (rec.has_video) {
      ++video[d];
      if (rec.has_pov) ++pov[d];
    }
  }
  AppearanceRates rates;
  if (video[0]) rates.left = static_cast<double>(pov[0]) / static_cast<double>(video[0]);
  if (video[1]) rates.right = static_cast<double>(pov[1]) / static_cast<double>(video[1]);
  return rates;
}

}  // namespace truckgap
