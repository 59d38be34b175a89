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
#ifndef RDDEVAL_FUSION_H_
#define RDDEVAL_FUSION_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rddeval/dataset.h"

namespace rddeval {

enum class FusionStrategy { kUnionNms, kConsensus, kWeightedFusion };

std::string_view ToString(FusionStrategy strategy);
std::optional<FusionStrategy> FusionStrategyFromName(std::string_view name);

// Model id assigned to boxes produced by weighted fusion.
inline constexpr std::string_view kFusedModelId = "ensemble";

struct FusionConfig {
  FusionStrategy strategy = FusionStrategy::kUnionNms;
  double iou_cluster_threshold = 0.5;
  std::size_t min_votes = 1;  // consensus only
  std::map<std::string, double> model_weights;  // missing models weigh 1.0
  double skip_box_threshold = 0.0;

  double WeightOf(std::string_view model_id) const;
};

// Throws Error(kEmptyEnsemble) when `model_ids` is empty and
// Error(kInvalidConfig) when the config cannot be applied to those models.
void ValidateFusionConfig(const FusionConfig& cfg,
                          const std::vector<std::string>& model_ids);

// Reads `key = value` lines. Keys: strategy, iou_cluster_threshold,
// min_votes, skip_box_threshold, weight.<model_id>. '#' starts a comment.
// Keys absent from the text keep the values already in `base`.
FusionConfig ParseFusionConfig(std::string_view text,
                               FusionConfig base = {});

// model_id -> that model's detections.
using DetectionSets = std::map<std::string, std::vector<Detection>>;

// Greedy per-class NMS on one image. Output is sorted by descending
// confidence; equal confidences keep input order.
std::vector<Detection> Nms(std::span<const Detection> dets,
                           double iou_threshold);

struct ClusterMember {
  Detection det;
  std::string model_id;
  std::size_t index;  // position within that model's detection list
};

struct Cluster {
  DamageClass cls;
  std::string image_id;
  std::vector<ClusterMember> members;
  std::size_t representative = 0;  // index into members

  const Detection& Representative() const {
    return members[representative].det;
  }
  std::size_t DistinctModels() const;
};

// Single-image greedy clustering. All boxes are visited by descending
// confidence, ties broken by (model_id, index); each joins the first
// same-class cluster whose representative it overlaps with IoU above the
// threshold, else seeds a new cluster. Clusters are returned in creation
// order.
std::vector<Cluster> ClusterDetections(const DetectionSets& det_sets,
                                       const FusionConfig& cfg);

// Fuses one image. Every model of the ensemble must appear as a key, with
// an empty list if it produced nothing for this image, because the number
// of keys is the ensemble size used by weighted fusion.
std::vector<Detection> FuseImage(const DetectionSets& det_sets,
                                 const FusionConfig& cfg);

// Fuses every image, in image_id order, on up to `threads` workers.
// Output is identical for any thread count.
std::vector<Detection> Fuse(const DetectionSets& det_sets,
                            const FusionConfig& cfg, int threads = 1);

}  // namespace rddeval

#endif  // RDDEVAL_FUSION_H_
