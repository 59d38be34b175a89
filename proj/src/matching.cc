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
#include "rddeval/matching.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <string_view>

#include "rddeval/error.h"
#include "rddeval/parallel.h"

namespace rddeval {
namespace {

double SafeRatio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

void CheckIouThreshold(double t) {
  if (!(t > 0.0 && t < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "IoU threshold must lie in (0, 1), got " + std::to_string(t));
  }
}

std::string_view CommonImageId(std::span<const GroundTruthBox> gts,
                               std::span<const Detection> dets) {
  std::string_view id;
  bool have = false;
  auto check = [&](std::string_view next) {
    if (!have) {
      id = next;
      have = true;
    } else if (next != id) {
      throw Error(ErrorCode::kMixedImageIds,
                  "inputs span images '" + std::string(id) + "' and '" +
                      std::string(next) + "'");
    }
  };
  for (const auto& g : gts) check(g.image_id);
  for (const auto& d : dets) check(d.image_id);
  return id;
}

std::size_t ClassSlot(DamageClass cls) { return static_cast<std::size_t>(cls); }

}  // namespace

Scores ComputeF1(const Counts& c) {
  Scores s;
  const auto tp = static_cast<double>(c.tp);
  s.precision = SafeRatio(tp, tp + static_cast<double>(c.fp));
  s.recall = SafeRatio(tp, tp + static_cast<double>(c.fn));
  s.f1 = SafeRatio(2.0 * s.precision * s.recall, s.precision + s.recall);
  return s;
}

MatchOutcome MatchImage(std::span<const GroundTruthBox> gts,
                        std::span<const Detection> dets,
                        double iou_threshold) {
  CheckIouThreshold(iou_threshold);
  MatchOutcome out;
  out.image_id = std::string(CommonImageId(gts, dets));

  // Candidate ground truths bucketed by class, ascending index.
  std::array<std::vector<std::size_t>, kAllDamageClasses.size()> by_class;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    by_class[ClassSlot(gts[g].cls)].push_back(g);
  }

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].confidence > dets[b].confidence;
                   });

  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : order) {
    const auto& det = dets[d];
    std::size_t best = gts.size();
    double best_iou = iou_threshold;
    for (std::size_t g : by_class[ClassSlot(det.cls)]) {
      if (taken[g]) continue;
      const double iou = Iou(det.box, gts[g].box);
      if (iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best < gts.size()) {
      taken[best] = true;
      out.pairs.push_back({d, best, best_iou});
    }
  }

  out.tp = out.pairs.size();
  out.fp = dets.size() - out.tp;
  out.fn = gts.size() - out.tp;
  return out;
}

GroundTruthIndex BuildGroundTruthIndex(
    std::span<const Annotation> annotations) {
  GroundTruthIndex index;
  for (const auto& ann : annotations) {
    auto& boxes = index[ann.image_id];
    boxes.insert(boxes.end(), ann.boxes.begin(), ann.boxes.end());
  }
  return index;
}

std::vector<ImageResult> MatchAll(const GroundTruthIndex& gt,
                                  std::span<const Detection> dets,
                                  const EvalOptions& options) {
  CheckIouThreshold(options.iou_threshold);

  std::map<std::string, std::vector<Detection>> by_image;
  for (const auto& [id, boxes] : gt) by_image[id];
  for (const auto& d : dets) {
    if (d.confidence < options.conf_threshold) continue;
    by_image[d.image_id].push_back(d);
  }

  std::vector<const std::string*> ids;
  std::vector<ImageResult> results(by_image.size());
  ids.reserve(by_image.size());
  std::size_t k = 0;
  for (auto& [id, image_dets] : by_image) {
    ids.push_back(&id);
    results[k++].dets = std::move(image_dets);
  }

  static const std::vector<GroundTruthBox> kNoGroundTruth;
  ParallelFor(results.size(), options.threads, [&](std::size_t i) {
    const auto it = gt.find(*ids[i]);
    const auto& gts = it == gt.end() ? kNoGroundTruth : it->second;
    results[i].outcome =
        MatchImage(gts, results[i].dets, options.iou_threshold);
    results[i].outcome.image_id = *ids[i];
  });
  return results;
}

MetricsReport Evaluate(const GroundTruthIndex& gt,
                       std::span<const Detection> dets,
                       const EvalOptions& options) {
  const auto results = MatchAll(gt, dets, options);

  MetricsReport report;
  report.images = results.size();
  std::map<DamageClass, Counts> per_class;
  std::map<Country, Counts> per_country;
  for (DamageClass c : kAllDamageClasses) per_class[c];

  static const std::vector<GroundTruthBox> kNoGroundTruth;
  for (const auto& r : results) {
    const auto& o = r.outcome;
    const auto it = gt.find(o.image_id);
    const auto& gts = it == gt.end() ? kNoGroundTruth : it->second;

    std::vector<bool> det_matched(r.dets.size(), false);
    std::vector<bool> gt_matched(gts.size(), false);
    for (const auto& p : o.pairs) {
      det_matched[p.det_index] = true;
      gt_matched[p.gt_index] = true;
      ++per_class[r.dets[p.det_index].cls].tp;
    }
    for (std::size_t d = 0; d < r.dets.size(); ++d) {
      if (!det_matched[d]) ++per_class[r.dets[d].cls].fp;
    }
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!gt_matched[g]) ++per_class[gts[g].cls].fn;
    }

    const Counts image_counts{o.tp, o.fp, o.fn};
    per_country[CountryOf(o.image_id)] += image_counts;
    report.counts += image_counts;
  }

  report.scores = ComputeF1(report.counts);
  for (const auto& [cls, c] : per_class) {
    report.per_class[cls] = {c, ComputeF1(c)};
  }
  for (const auto& [country, c] : per_country) {
    report.per_country[country] = {c, ComputeF1(c)};
  }
  return report;
}

}  // namespace rddeval
