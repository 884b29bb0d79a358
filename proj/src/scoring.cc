// psdet/scoring.cc

// Copyright 2026  psdet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "psdet/scoring.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>

#include "psdet/error.h"

namespace psdet {

std::vector<double> MovingAverage(std::span<const double> values, int window) {
  if (window < 1) throw Error(ErrorCode::kInvalidConfig, "window must be >= 1");
  const int n = static_cast<int>(values.size());
  const int before = (window - 1) / 2, after = window / 2;
  std::vector<double> out(n);
  for (int t = 0; t < n; t++) {
    const int lo = std::max(0, t - before), hi = std::min(n - 1, t + after);
    double sum = 0.0;
    for (int s = lo; s <= hi; s++) sum += values[s];
    out[t] = sum / (hi - lo + 1);
  }
  return out;
}

double ScoreAverage(const ScoreSeries &series) {
  if (series.empty()) throw Error(ErrorCode::kEmptySeries, "cannot average empty series");
  double sum = 0.0;
  for (double v : series.values) sum += v;
  return sum / static_cast<double>(series.size());
}

double InterleavedAware(const ScoreSeries &series, const InterleavedOptions &opts) {
  if (series.empty()) throw Error(ErrorCode::kEmptySeries, "cannot pool empty series");
  if (opts.top_frac <= 0.0 || opts.top_frac > 1.0)
    throw Error(ErrorCode::kInvalidConfig, "top_frac must lie in (0, 1]");
  std::vector<double> smoothed = series.values;
  for (int r = 0; r < opts.repeats; r++) smoothed = MovingAverage(smoothed, opts.smooth_len);
  const size_t n = smoothed.size();
  const size_t k = std::max<size_t>(
      1, static_cast<size_t>(std::ceil(opts.top_frac * static_cast<double>(n) - 1e-12)));
  std::partial_sort(smoothed.begin(), smoothed.begin() + k, smoothed.end(),
                    std::greater<double>());
  double sum = 0.0;
  for (size_t i = 0; i < k; i++) sum += smoothed[i];
  return sum / static_cast<double>(k);
}

namespace {

// Operating point in integer units: x = misses * n_nontarget,
// y = false alarms * n_target, so both rates share the denominator
// n_target * n_nontarget.
struct OperatingPoint {
  int64_t x, y;
  double threshold;
};

__int128 Cross(const OperatingPoint &o, const OperatingPoint &a,
               const OperatingPoint &b) {
  return static_cast<__int128>(a.x - o.x) * (b.y - o.y) -
         static_cast<__int128>(a.y - o.y) * (b.x - o.x);
}

}  // namespace

EvalReport ComputeEer(std::span<const double> target_scores,
                      std::span<const double> nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw Error(ErrorCode::kEmptyClass, "EER needs target and nontarget scores");
  const int64_t n_tgt = static_cast<int64_t>(target_scores.size());
  const int64_t n_non = static_cast<int64_t>(nontarget_scores.size());

  std::vector<std::pair<double, bool>> all;  // (score, is_target)
  all.reserve(target_scores.size() + nontarget_scores.size());
  for (double s : target_scores) all.emplace_back(s, true);
  for (double s : nontarget_scores) all.emplace_back(s, false);
  std::sort(all.begin(), all.end());

  // Sweep the threshold upward through every distinct score.
  std::vector<OperatingPoint> points;
  int64_t misses = 0, false_alarms = n_non;
  points.push_back({0, false_alarms * n_tgt, all.front().first});
  for (size_t i = 0; i < all.size();) {
    const double v = all[i].first;
    while (i < all.size() && all[i].first == v) {
      if (all[i].second) misses++; else false_alarms--;
      i++;
    }
    // The next distinct score is the smallest threshold realizing this
    // point; a midpoint can round back onto v.
    const double next_threshold =
        i < all.size() ? all[i].first
                       : std::nextafter(v, std::numeric_limits<double>::infinity());
    points.push_back({misses * n_non, false_alarms * n_tgt, next_threshold});
  }

  // Lower convex hull.  Points are already ordered by x ascending; among
  // equal x keep the lowest y, which is the last one emitted.
  std::vector<OperatingPoint> ordered;
  for (const auto &p : points) {
    if (!ordered.empty() && ordered.back().x == p.x) {
      if (p.y <= ordered.back().y) ordered.back() = p;
      continue;
    }
    ordered.push_back(p);
  }
  std::vector<OperatingPoint> hull;
  for (const auto &p : ordered) {
    while (hull.size() >= 2 && Cross(hull[hull.size() - 2], hull.back(), p) <= 0)
      hull.pop_back();
    hull.push_back(p);
  }

  EvalReport report;
  report.n_target = static_cast<int>(n_tgt);
  report.n_nontarget = static_cast<int>(n_non);
  const double denom = static_cast<double>(n_tgt) * static_cast<double>(n_non);
  for (size_t i = 0; i < hull.size(); i++) {
    const OperatingPoint &p = hull[i];
    if (p.x - p.y < 0) continue;
    if (p.x == p.y || i == 0) {
      report.eer = static_cast<double>(p.x) / denom;
      report.threshold = p.threshold;
      return report;
    }
    const OperatingPoint &q = hull[i - 1];
    // Crossing of the segment q -> p with x == y.
    const __int128 num = static_cast<__int128>(q.x) * p.y - static_cast<__int128>(q.y) * p.x;
    const __int128 den = static_cast<__int128>((q.x - q.y) - (p.x - p.y)) * n_tgt * n_non;
    report.eer = static_cast<double>(num) / static_cast<double>(den);
    report.threshold = q.threshold;
    return report;
  }
  // Unreachable: the last point has y == 0.
  report.eer = 0.5;
  return report;
}

std::string FormatEvalReport(const EvalReport &report, const std::string &pooling) {
  std::ostringstream os;
  os.precision(10);
  os << "pooling = " << pooling << "\n"
     << "eer = " << report.eer << "\n"
     << "eer_percent = " << report.eer * 100.0 << "\n"
     << "threshold = " << report.threshold << "\n"
     << "n_target = " << report.n_target << "\n"
     << "n_nontarget = " << report.n_nontarget << "\n";
  return os.str();
}

}  // namespace psdet
