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
#include "rddeval/fusion.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rddeval/error.h"
#include "rddeval/parallel.h"
#include "text_util.h"

namespace rddeval {
namespace {

using internal::ParseDouble;
using internal::ParseInt;
using internal::SplitLines;
using internal::Trim;

[[noreturn]] void ThrowConfig(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

void CheckSingleImage(std::span<const Detection> dets) {
  for (const auto& d : dets) {
    if (d.image_id != dets.front().image_id) {
      throw Error(ErrorCode::kMixedImageIds,
                  "inputs span images '" + dets.front().image_id + "' and '" +
                      d.image_id + "'");
    }
  }
}

void CheckSingleImage(const DetectionSets& det_sets) {
  const std::string* first = nullptr;
  for (const auto& [model, dets] : det_sets) {
    for (const auto& d : dets) {
      if (!first) {
        first = &d.image_id;
      } else if (d.image_id != *first) {
        throw Error(ErrorCode::kMixedImageIds,
                    "inputs span images '" + *first + "' and '" + d.image_id +
                        "'");
      }
    }
  }
}

std::vector<std::string> ModelIds(const DetectionSets& det_sets) {
  std::vector<std::string> ids;
  for (const auto& [id, dets] : det_sets) ids.push_back(id);
  return ids;
}

std::vector<Detection> Representatives(const std::vector<Cluster>& clusters,
                                       std::size_t min_votes) {
  std::vector<Detection> out;
  for (const auto& c : clusters) {
    if (c.DistinctModels() >= min_votes) out.push_back(c.Representative());
  }
  return out;
}

std::vector<Detection> WeightedFusion(const std::vector<Cluster>& clusters,
                                      const FusionConfig& cfg,
                                      std::size_t num_models) {
  std::vector<Detection> out;
  for (const auto& c : clusters) {
    double weight_sum = 0.0;
    double score_sum = 0.0;
    double coords[4] = {0.0, 0.0, 0.0, 0.0};
    for (const auto& m : c.members) {
      const double w = cfg.WeightOf(m.model_id);
      const double s = w * m.det.confidence;
      weight_sum += w;
      score_sum += s;
      coords[0] += s * m.det.box.xmin();
      coords[1] += s * m.det.box.ymin();
      coords[2] += s * m.det.box.xmax();
      coords[3] += s * m.det.box.ymax();
    }

    Detection fused = c.Representative();
    fused.model_id = std::string(kFusedModelId);
    if (score_sum > 0.0) {
      // A convex combination of valid boxes is itself valid, but guard
      // against rounding collapsing a sliver.
      if (auto box = BBox::TryCreate(coords[0] / score_sum,
                                     coords[1] / score_sum,
                                     coords[2] / score_sum,
                                     coords[3] / score_sum)) {
        fused.box = *box;
      }
      fused.confidence = (score_sum / weight_sum) *
                         (static_cast<double>(c.DistinctModels()) /
                          static_cast<double>(num_models));
    } else {
      fused.confidence = 0.0;
    }
    if (fused.confidence < cfg.skip_box_threshold) continue;
    out.push_back(std::move(fused));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.confidence > b.confidence;
                   });
  return out;
}

}  // namespace

std::string_view ToString(FusionStrategy strategy) {
  switch (strategy) {
    case FusionStrategy::kUnionNms:
      return "union_nms";
    case FusionStrategy::kConsensus:
      return "consensus";
    case FusionStrategy::kWeightedFusion:
      return "weighted_fusion";
  }
  return "?";
}

std::optional<FusionStrategy> FusionStrategyFromName(std::string_view name) {
  for (auto s : {FusionStrategy::kUnionNms, FusionStrategy::kConsensus,
                 FusionStrategy::kWeightedFusion}) {
    if (ToString(s) == name) return s;
  }
  return std::nullopt;
}

double FusionConfig::WeightOf(std::string_view model_id) const {
  const auto it = model_weights.find(std::string(model_id));
  return it == model_weights.end() ? 1.0 : it->second;
}

void ValidateFusionConfig(const FusionConfig& cfg,
                          const std::vector<std::string>& model_ids) {
  if (model_ids.empty()) {
    throw Error(ErrorCode::kEmptyEnsemble, "no model detection sets given");
  }
  if (!(cfg.iou_cluster_threshold > 0.0 && cfg.iou_cluster_threshold < 1.0)) {
    ThrowConfig("iou_cluster_threshold must lie in (0, 1)");
  }
  if (cfg.strategy == FusionStrategy::kConsensus &&
      (cfg.min_votes < 1 || cfg.min_votes > model_ids.size())) {
    ThrowConfig("min_votes must lie in [1, " +
                std::to_string(model_ids.size()) + "], got " +
                std::to_string(cfg.min_votes));
  }
  if (!std::isfinite(cfg.skip_box_threshold)) {
    ThrowConfig("skip_box_threshold must be finite");
  }
  for (const auto& [id, w] : cfg.model_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      ThrowConfig("weight of model '" + id + "' must be finite and >= 0");
    }
  }
  const bool any_positive =
      std::any_of(model_ids.begin(), model_ids.end(),
                  [&](const std::string& id) { return cfg.WeightOf(id) > 0; });
  if (!any_positive) ThrowConfig("model weights are all zero");
}

FusionConfig ParseFusionConfig(std::string_view text, FusionConfig base) {
  FusionConfig cfg = std::move(base);
  int line_no = 0;
  for (auto line : SplitLines(text)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) ThrowConfig(where + "expected key=value");
    const auto key = Trim(line.substr(0, eq));
    const auto value = Trim(line.substr(eq + 1));
    auto number = [&]() {
      const auto v = ParseDouble(value);
      if (!v) ThrowConfig(where + "'" + std::string(value) + "' is not a number");
      return *v;
    };
    if (key == "strategy") {
      const auto s = FusionStrategyFromName(value);
      if (!s) ThrowConfig(where + "unknown strategy '" + std::string(value) + "'");
      cfg.strategy = *s;
    } else if (key == "iou_cluster_threshold") {
      cfg.iou_cluster_threshold = number();
    } else if (key == "min_votes") {
      const auto v = ParseInt(value);
      if (!v || *v < 1) ThrowConfig(where + "min_votes must be a positive integer");
      cfg.min_votes = static_cast<std::size_t>(*v);
    } else if (key == "skip_box_threshold") {
      cfg.skip_box_threshold = number();
    } else if (key.starts_with("weight.") && key.size() > 7) {
      cfg.model_weights[std::string(key.substr(7))] = number();
    } else {
      ThrowConfig(where + "unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

std::vector<Detection> Nms(std::span<const Detection> dets,
                           double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    ThrowConfig("NMS IoU threshold must lie in (0, 1)");
  }
  CheckSingleImage(dets);

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].confidence > dets[b].confidence;
                   });

  std::vector<Detection> kept;
  for (std::size_t i : order) {
    const auto& cand = dets[i];
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
          return k.cls == cand.cls && Iou(k.box, cand.box) > iou_threshold;
        });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

std::size_t Cluster::DistinctModels() const {
  std::set<std::string_view> ids;
  for (const auto& m : members) ids.insert(m.model_id);
  return ids.size();
}

std::vector<Cluster> ClusterDetections(const DetectionSets& det_sets,
                                       const FusionConfig& cfg) {
  CheckSingleImage(det_sets);

  std::vector<ClusterMember> pool;
  for (const auto& [model, dets] : det_sets) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      ClusterMember m{dets[i], model, i};
      m.det.model_id = model;
      pool.push_back(std::move(m));
    }
  }
  // Map iteration already yields (model_id, index) order, so a stable sort
  // on confidence alone realizes the full tie-break.
  std::stable_sort(pool.begin(), pool.end(),
                   [](const ClusterMember& a, const ClusterMember& b) {
                     return a.det.confidence > b.det.confidence;
                   });

  std::vector<Cluster> clusters;
  for (auto& m : pool) {
    Cluster* home = nullptr;
    for (auto& c : clusters) {
      if (c.cls == m.det.cls &&
          Iou(c.Representative().box, m.det.box) > cfg.iou_cluster_threshold) {
        home = &c;
        break;
      }
    }
    if (!home) {
      clusters.push_back({m.det.cls, m.det.image_id, {}, 0});
      home = &clusters.back();
    }
    home->members.push_back(std::move(m));
    if (home->members.back().det.confidence >
        home->Representative().confidence) {
      home->representative = home->members.size() - 1;
    }
  }
  return clusters;
}

std::vector<Detection> FuseImage(const DetectionSets& det_sets,
                                 const FusionConfig& cfg) {
  const auto model_ids = ModelIds(det_sets);
  ValidateFusionConfig(cfg, model_ids);

  switch (cfg.strategy) {
    case FusionStrategy::kUnionNms: {
      CheckSingleImage(det_sets);
      std::vector<Detection> all;
      for (const auto& [model, dets] : det_sets) {
        all.insert(all.end(), dets.begin(), dets.end());
      }
      return Nms(all, cfg.iou_cluster_threshold);
    }
    case FusionStrategy::kConsensus:
      return Representatives(ClusterDetections(det_sets, cfg), cfg.min_votes);
    case FusionStrategy::kWeightedFusion:
      return WeightedFusion(ClusterDetections(det_sets, cfg), cfg,
                            model_ids.size());
  }
  return {};
}

std::vector<Detection> Fuse(const DetectionSets& det_sets,
                            const FusionConfig& cfg, int threads) {
  ValidateFusionConfig(cfg, ModelIds(det_sets));

  std::map<std::string, DetectionSets> per_image;
  for (const auto& [model, dets] : det_sets) {
    for (const auto& d : dets) per_image[d.image_id][model].push_back(d);
  }
  std::vector<DetectionSets*> images;
  for (auto& [id, sets] : per_image) {
    for (const auto& [model, dets] : det_sets) sets[model];
    images.push_back(&sets);
  }

  std::vector<std::vector<Detection>> fused(images.size());
  ParallelFor(images.size(), threads, [&](std::size_t i) {
    fused[i] = FuseImage(*images[i], cfg);
  });

  std::vector<Detection> out;
  for (auto& f : fused) {
    out.insert(out.end(), std::make_move_iterator(f.begin()),
               std::make_move_iterator(f.end()));
  }
  return out;
}

}  // namespace rddeval
