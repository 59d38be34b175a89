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
#ifndef RDDEVAL_SWEEP_H_
#define RDDEVAL_SWEEP_H_

#include <span>
#include <string_view>
#include <vector>

#include "rddeval/matching.h"

namespace rddeval {

struct CurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct SweepResult {
  double best_threshold = 0.0;
  Scores best;
  std::vector<CurvePoint> curve;  // grid order
};

// Evaluates the confidence gate at every grid value. The best threshold is
// the argmax of F1, ties going to the lowest threshold. Grid values must lie
// in [0, 1) and the grid must be non-empty.
SweepResult SweepThreshold(const GroundTruthIndex& gt,
                           std::span<const Detection> dets,
                           std::span<const double> grid,
                           double iou_threshold = kDefaultIouThreshold,
                           int threads = 1);

// "start:stop:step" (start inclusive, stop exclusive) or a comma-separated
// list. Generated values are rounded to 12 decimals so 0.1 steps print
// cleanly.
std::vector<double> ParseGrid(std::string_view spec);

}  // namespace rddeval

#endif  // RDDEVAL_SWEEP_H_
