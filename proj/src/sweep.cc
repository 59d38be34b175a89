/* Copyright 2026 The rddeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "rddeval/sweep.h"

#include <cmath>

#include "rddeval/error.h"
#include "text_util.h"

namespace rddeval {

SweepResult SweepThreshold(const GroundTruthIndex& gt,
                           std::span<const Detection> dets,
                           std::span<const double> grid, double iou_threshold,
                           int threads) {
  if (grid.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "threshold grid is empty");
  }
  for (double t : grid) {
    if (!(t >= 0.0 && t < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "grid value " + internal::FormatShortest(t) +
                      " outside [0, 1)");
    }
  }

  SweepResult result;
  bool have_best = false;
  for (double t : grid) {
    const auto report = Evaluate(gt, dets, {t, iou_threshold, threads});
    result.curve.push_back({t, report.scores.precision, report.scores.recall,
                            report.scores.f1});
    const bool better = !have_best || report.scores.f1 > result.best.f1 ||
                        (report.scores.f1 == result.best.f1 &&
                         t < result.best_threshold);
    if (better) {
      have_best = true;
      result.best_threshold = t;
      result.best = report.scores;
    }
  }
  return result;
}

std::vector<double> ParseGrid(std::string_view spec) {
  using internal::ParseDouble;
  using internal::Split;
  using internal::Trim;
  auto fail = [&](const std::string& why) -> void {
    throw Error(ErrorCode::kInvalidConfig,
                "bad grid '" + std::string(spec) + "': " + why);
  };

  std::vector<double> grid;
  if (spec.find(':') != std::string_view::npos) {
    const auto parts = Split(spec, ':');
    if (parts.size() != 3) fail("expected start:stop:step");
    const auto start = ParseDouble(Trim(parts[0]));
    const auto stop = ParseDouble(Trim(parts[1]));
    const auto step = ParseDouble(Trim(parts[2]));
    if (!start || !stop || !step) fail("non-numeric field");
    if (!(*step > 0.0)) fail("step must be positive");
    const double span = (*stop - *start) / *step;
    const auto n = static_cast<long long>(std::ceil(span - 1e-9));
    for (long long i = 0; i < n; ++i) {
      const double v = *start + static_cast<double>(i) * *step;
      grid.push_back(std::round(v * 1e12) / 1e12);
    }
  } else {
    for (auto part : Split(spec, ',')) {
      const auto v = ParseDouble(Trim(part));
      if (!v) fail("non-numeric value '" + std::string(part) + "'");
      grid.push_back(*v);
    }
  }
  if (grid.empty()) fail("no values");
  return grid;
}

}  // namespace rddeval
