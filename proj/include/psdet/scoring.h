// psdet/scoring.h

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

#ifndef PSDET_SCORING_H_
#define PSDET_SCORING_H_

#include <span>
#include <string>
#include <vector>

namespace psdet {

// Ordered per-window (or per-frame) scores.  Higher means more spoof-like.
struct ScoreSeries {
  std::vector<double> values;
  int shift_frames = 10;
  std::string origin;

  size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

// Centred moving average over frames t - (w-1)/2 .. t + w/2, truncated at
// the edges and divided by the number of frames actually covered.
std::vector<double> MovingAverage(std::span<const double> values, int window);

// Arithmetic mean.  Throws EmptySeries.
double ScoreAverage(const ScoreSeries &series);

struct InterleavedOptions {
  int smooth_len = 10;
  double top_frac = 0.05;
  // How many times the mean filter is applied.
  int repeats = 1;
};

// Smooths the series, then returns the mean of its k = max(1, ceil(top_frac
// * n)) largest smoothed values.  A short spoofed insertion lifts a few
// neighbouring windows; averaging only the top of the smoothed curve keeps
// that evidence from being diluted by the rest of the utterance.
double InterleavedAware(const ScoreSeries &series,
                        const InterleavedOptions &opts = InterleavedOptions());

struct EvalReport {
  double eer = 0.0;
  double threshold = 0.0;
  int n_target = 0;
  int n_nontarget = 0;
};

// Equal error rate with target = spoof and a trial accepted as spoof when
// score >= threshold.  The miss/false-alarm operating points are joined by
// their lower convex hull (linear interpolation between adjacent hull
// points) and the EER is where that hull crosses miss == false alarm.
// Throws EmptyClass when either list is empty.
EvalReport ComputeEer(std::span<const double> target_scores,
                      std::span<const double> nontarget_scores);

std::string FormatEvalReport(const EvalReport &report, const std::string &pooling);

}  // namespace psdet

#endif  // PSDET_SCORING_H_
