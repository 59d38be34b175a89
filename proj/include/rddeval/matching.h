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
#ifndef RDDEVAL_MATCHING_H_
#define RDDEVAL_MATCHING_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rddeval/dataset.h"

namespace rddeval {

inline constexpr double kDefaultIouThreshold = 0.5;

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
  friend Counts operator+(Counts a, const Counts& b) { return a += b; }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// p = tp / (tp + fp), r = tp / (tp + fn), f1 = 2pr / (p + r). Any 0/0
// resolves to 0.
Scores ComputeF1(const Counts& counts);

struct MatchPair {
  std::size_t det_index;  // index into the detections passed in
  std::size_t gt_index;   // index into the ground truths passed in
  double iou;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchOutcome {
  std::string image_id;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // In the order the matches were made (descending detection confidence).
  std::vector<MatchPair> pairs;
};

// Greedy one-to-one matching for a single image. Detections are visited in
// descending confidence (ties keep input order); each claims the unmatched
// ground truth of the same class with the highest IoU (ties: lowest index),
// provided that IoU is strictly greater than `iou_threshold`.
//
// Throws Error(kMixedImageIds) if the inputs span more than one image and
// Error(kInvalidConfig) unless 0 < iou_threshold < 1.
MatchOutcome MatchImage(std::span<const GroundTruthBox> gts,
                        std::span<const Detection> dets,
                        double iou_threshold = kDefaultIouThreshold);

struct LevelMetrics {
  Counts counts;
  Scores scores;
};

struct MetricsReport {
  Counts counts;
  Scores scores;
  std::size_t images = 0;
  // Every class is always present.
  std::map<DamageClass, LevelMetrics> per_class;
  // Countries seen in the ground truth or the detections.
  std::map<Country, LevelMetrics> per_country;
};

// image_id -> ground truths. Background images map to an empty vector.
using GroundTruthIndex = std::map<std::string, std::vector<GroundTruthBox>>;

GroundTruthIndex BuildGroundTruthIndex(std::span<const Annotation> annotations);

struct EvalOptions {
  double conf_threshold = 0.0;
  double iou_threshold = kDefaultIouThreshold;
  int threads = 1;
};

struct ImageResult {
  MatchOutcome outcome;
  // The confidence-gated detections the outcome's det_index refers to.
  std::vector<Detection> dets;
};

// Matches every image present in the ground truth or the detections, in
// image_id order. Detections with confidence < conf_threshold are dropped
// first; detections on images missing from `gt` are all false positives.
std::vector<ImageResult> MatchAll(const GroundTruthIndex& gt,
                                  std::span<const Detection> dets,
                                  const EvalOptions& options = {});

// Micro-averaged scores over all boxes, plus per-class and per-country
// breakdowns. Results do not depend on options.threads.
MetricsReport Evaluate(const GroundTruthIndex& gt,
                       std::span<const Detection> dets,
                       const EvalOptions& options = {});

}  // namespace rddeval

#endif  // RDDEVAL_MATCHING_H_
