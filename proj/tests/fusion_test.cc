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

#include <optional>
#include <tuple>

#include <gtest/gtest.h>
#include "rddeval/error.h"
#include "test_support.h"

namespace rddeval {
namespace {

Detection Det(DamageClass cls, double conf, double x0, double y0, double x1,
              double y1, std::string image = "img") {
  return {std::move(image), cls, BBox::Create(x0, y0, x1, y1), conf};
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIo;
}

TEST(NmsTest, DominatedDuplicateIsRemoved) {
  // IoU of the two boxes is 0.9.
  const std::vector<Detection> dets = {Det(DamageClass::kD00, 0.6, 0, 0, 100, 90),
                                       Det(DamageClass::kD00, 0.9, 0, 0, 100, 100)};
  ASSERT_DOUBLE_EQ(Iou(dets[0].box, dets[1].box), 0.9);
  const auto kept = Nms(dets, 0.5);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].confidence, 0.9);
}

TEST(NmsTest, LowOverlapKeepsBoth) {
  const std::vector<Detection> dets = {Det(DamageClass::kD00, 0.6, 0, 0, 10, 10),
                                       Det(DamageClass::kD00, 0.9, 7, 0, 17, 10)};
  ASSERT_LT(Iou(dets[0].box, dets[1].box), 0.25);
  const auto kept = Nms(dets, 0.5);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].confidence, 0.9);  // sorted by confidence
}

TEST(NmsTest, ThreeBoxExample) {
  const std::vector<Detection> dets = {Det(DamageClass::kD00, 0.9, 0, 0, 10, 10),
                                       Det(DamageClass::kD00, 0.8, 1, 1, 11, 11),
                                       Det(DamageClass::kD00, 0.7, 20, 20, 30, 30)};
  EXPECT_NEAR(testing::ReferenceIou(dets[0].box, dets[1].box), 81.0 / 119.0,
              1e-15);
  const auto kept = Nms(dets, 0.5);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], dets[0]);
  EXPECT_EQ(kept[1], dets[2]);
}

TEST(NmsTest, ClassesAreIndependent) {
  const std::vector<Detection> dets = {Det(DamageClass::kD00, 0.9, 0, 0, 10, 10),
                                       Det(DamageClass::kD40, 0.8, 0, 0, 10, 10)};
  EXPECT_EQ(Nms(dets, 0.5).size(), 2u);
}

TEST(NmsTest, Errors) {
  const std::vector<Detection> dets = {
      Det(DamageClass::kD00, 0.9, 0, 0, 10, 10, "a"),
      Det(DamageClass::kD00, 0.8, 0, 0, 10, 10, "b")};
  EXPECT_EQ(CodeOf([&] { Nms(dets, 0.5); }), ErrorCode::kMixedImageIds);
  EXPECT_EQ(CodeOf([&] { Nms({}, 1.0); }), ErrorCode::kInvalidConfig);
}

TEST(ClusterTest, IdenticalBoxesFromTwoModels) {
  DetectionSets sets;
  sets["a"] = {Det(DamageClass::kD10, 0.7, 5, 5, 50, 50)};
  sets["b"] = {Det(DamageClass::kD10, 0.7, 5, 5, 50, 50)};
  const auto clusters = ClusterDetections(sets, {});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].members.size(), 2u);
  EXPECT_EQ(clusters[0].DistinctModels(), 2u);
  // Equal confidence: model "a" comes first and represents the cluster.
  EXPECT_EQ(clusters[0].members[0].model_id, "a");
  EXPECT_EQ(clusters[0].Representative().model_id, "a");
}

TEST(ClusterTest, DisjointBoxesSeedSeparateClusters) {
  DetectionSets sets;
  sets["a"] = {Det(DamageClass::kD10, 0.7, 0, 0, 10, 10),
               Det(DamageClass::kD10, 0.6, 20, 20, 30, 30)};
  EXPECT_EQ(ClusterDetections(sets, {}).size(), 2u);
}

// IoU(A,C) cannot drop below 0.2 when A~B and B~C are both 0.6, since
// 1 - IoU is a metric. Search for integer boxes with A~B and B~C near 0.6
// and A~C as small as possible, then check that C does not chain into A.
TEST(ClusterTest, ChainedOverlapDoesNotMerge) {
  const auto a = BBox::Create(0, 0, 10, 10);
  std::optional<std::pair<BBox, BBox>> found;
  double best_ac = 1.0;
  for (int x0 = 0; x0 <= 10; ++x0) {
    for (int x1 = x0 + 1; x1 <= 20; ++x1) {
      for (int y1 = 1; y1 <= 20; ++y1) {
        const auto b = BBox::Create(x0, 0, x1, y1);
        if (std::abs(testing::ReferenceIou(a, b) - 0.6) > 0.03) continue;
        for (int cx0 = 0; cx0 <= 20; ++cx0) {
          for (int cx1 = cx0 + 1; cx1 <= 24; ++cx1) {
            for (int cy1 = 1; cy1 <= 20; ++cy1) {
              const auto c = BBox::Create(cx0, 0, cx1, cy1);
              if (std::abs(testing::ReferenceIou(b, c) - 0.6) > 0.03) continue;
              const double ac = testing::ReferenceIou(a, c);
              if (ac < best_ac) {
                best_ac = ac;
                found.emplace(b, c);
              }
            }
          }
        }
      }
    }
  }
  ASSERT_TRUE(found.has_value());
  EXPECT_GE(best_ac, 0.2 - 0.06);
  ASSERT_LT(best_ac, 0.5);
  const auto [b, c] = *found;

  DetectionSets sets;
  sets["m1"] = {{"img", DamageClass::kD00, a, 0.9}};
  sets["m2"] = {{"img", DamageClass::kD00, b, 0.8}};
  sets["m3"] = {{"img", DamageClass::kD00, c, 0.7}};
  const auto clusters = ClusterDetections(sets, {});
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].members.size(), 2u);
  EXPECT_EQ(clusters[0].Representative().box, a);
  EXPECT_EQ(clusters[1].members.size(), 1u);
  EXPECT_EQ(clusters[1].Representative().box, c);
}

TEST(FuseTest, SingleModelDisjointIsIdentityForEveryStrategy) {
  const std::vector<Detection> dets = {Det(DamageClass::kD00, 0.9, 0, 0, 10, 10),
                                       Det(DamageClass::kD20, 0.5, 30, 30, 60, 60),
                                       Det(DamageClass::kD00, 0.4, 80, 0, 90, 20)};
  DetectionSets sets{{"solo", dets}};
  for (auto strategy : {FusionStrategy::kUnionNms, FusionStrategy::kConsensus,
                        FusionStrategy::kWeightedFusion}) {
    FusionConfig cfg;
    cfg.strategy = strategy;
    const auto out = FuseImage(sets, cfg);
    ASSERT_EQ(out.size(), dets.size()) << ToString(strategy);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      EXPECT_EQ(out[i].box, dets[i].box);
      EXPECT_EQ(out[i].cls, dets[i].cls);
      EXPECT_DOUBLE_EQ(out[i].confidence, dets[i].confidence);
      EXPECT_EQ(out[i].image_id, dets[i].image_id);
    }
  }
}

TEST(FuseTest, UnanimousConsensus) {
  const std::vector<Detection> dets = {Det(DamageClass::kD00, 0.9, 0, 0, 10, 10),
                                       Det(DamageClass::kD10, 0.5, 30, 30, 60, 60)};
  DetectionSets sets{{"a", dets}, {"b", dets}, {"c", dets}};
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::kConsensus;
  cfg.min_votes = 3;
  const auto out = FuseImage(sets, cfg);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].box, dets[0].box);
  EXPECT_EQ(out[1].box, dets[1].box);
}

TEST(FuseTest, ConsensusDropsUnsupportedClusters) {
  DetectionSets sets;
  sets["a"] = {Det(DamageClass::kD00, 0.9, 0, 0, 10, 10),
               Det(DamageClass::kD00, 0.8, 50, 50, 60, 60)};
  sets["b"] = {Det(DamageClass::kD00, 0.7, 0, 0, 10, 11)};
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::kConsensus;
  cfg.min_votes = 2;
  const auto out = FuseImage(sets, cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].confidence, 0.9);
}

TEST(FuseTest, WeightedFusionTwoModelExample) {
  DetectionSets sets;
  sets["A"] = {Det(DamageClass::kD00, 0.8, 0, 0, 10, 10)};
  sets["B"] = {Det(DamageClass::kD00, 0.4, 0, 0, 20, 10)};
  ASSERT_EQ(Iou(sets["A"][0].box, sets["B"][0].box), 0.5);

  FusionConfig cfg;
  cfg.strategy = FusionStrategy::kWeightedFusion;
  auto out = FuseImage(sets, cfg);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.8 * 0.5);
  EXPECT_DOUBLE_EQ(out[1].confidence, 0.4 * 0.5);
  EXPECT_EQ(out[0].box, sets["A"][0].box);

  cfg.iou_cluster_threshold = 0.45;
  out = FuseImage(sets, cfg);
  ASSERT_EQ(out.size(), 1u);
  // Hand arithmetic: xmax = (0.8*10 + 0.4*20) / 1.2, conf = (1.2/2) * (2/2).
  EXPECT_NEAR(out[0].box.xmax(), 16.0 / 1.2, 1e-12);
  EXPECT_NEAR(out[0].box.xmax(), 13.33, 5e-3);
  EXPECT_EQ(out[0].box.xmin(), 0.0);
  EXPECT_NEAR(out[0].box.ymax(), 10.0, 1e-12);
  EXPECT_NEAR(out[0].confidence, 0.6, 1e-12);
  EXPECT_EQ(out[0].model_id, kFusedModelId);
}

TEST(FuseTest, WeightsAndSkipThreshold) {
  DetectionSets sets;
  sets["A"] = {Det(DamageClass::kD00, 0.8, 0, 0, 10, 10)};
  sets["B"] = {Det(DamageClass::kD00, 0.4, 0, 0, 20, 10)};
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::kWeightedFusion;
  cfg.iou_cluster_threshold = 0.45;
  cfg.model_weights = {{"A", 0.0}, {"B", 2.0}};
  auto out = FuseImage(sets, cfg);
  ASSERT_EQ(out.size(), 1u);
  // Only B contributes to coordinates; conf = (0.8 / 2) * 1.
  EXPECT_DOUBLE_EQ(out[0].box.xmax(), 20.0);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.4);

  cfg.skip_box_threshold = 0.5;
  EXPECT_TRUE(FuseImage(sets, cfg).empty());
}

TEST(FuseTest, ModelsWithoutBoxesStillCountTowardEnsembleSize) {
  DetectionSets sets;
  sets["A"] = {Det(DamageClass::kD00, 0.8, 0, 0, 10, 10, "x"),
               Det(DamageClass::kD00, 0.6, 0, 0, 10, 10, "y")};
  sets["B"] = {Det(DamageClass::kD00, 0.8, 0, 0, 10, 10, "x")};
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::kWeightedFusion;
  const auto out = Fuse(sets, cfg, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].image_id, "x");
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.8);
  EXPECT_EQ(out[1].image_id, "y");
  EXPECT_DOUBLE_EQ(out[1].confidence, 0.6 * 0.5);
}

TEST(FuseTest, Errors) {
  EXPECT_EQ(CodeOf([] { Fuse({}, {}); }), ErrorCode::kEmptyEnsemble);
  EXPECT_EQ(CodeOf([] { FuseImage({}, {}); }), ErrorCode::kEmptyEnsemble);
  DetectionSets sets{{"a", {Det(DamageClass::kD00, 0.8, 0, 0, 10, 10)}}};
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::kConsensus;
  cfg.min_votes = 2;
  EXPECT_EQ(CodeOf([&] { Fuse(sets, cfg); }), ErrorCode::kInvalidConfig);
  cfg = {};
  cfg.model_weights = {{"a", 0.0}};
  EXPECT_EQ(CodeOf([&] { Fuse(sets, cfg); }), ErrorCode::kInvalidConfig);
  cfg = {};
  cfg.model_weights = {{"a", -1.0}};
  EXPECT_EQ(CodeOf([&] { Fuse(sets, cfg); }), ErrorCode::kInvalidConfig);
  cfg = {};
  cfg.iou_cluster_threshold = 0.0;
  EXPECT_EQ(CodeOf([&] { Fuse(sets, cfg); }), ErrorCode::kInvalidConfig);
  sets["a"].push_back(Det(DamageClass::kD00, 0.8, 0, 0, 10, 10, "other"));
  EXPECT_EQ(CodeOf([&] { FuseImage(sets, {}); }), ErrorCode::kMixedImageIds);
}

TEST(FusionConfigTest, ParsesKeyValueText) {
  const auto cfg = ParseFusionConfig(
      "# ensemble of three\n"
      "strategy = weighted_fusion\n"
      "iou_cluster_threshold=0.55\n"
      "min_votes = 2  # consensus only\n"
      "skip_box_threshold = 0.1\n"
      "weight.yolo_416 = 0.5\n");
  EXPECT_EQ(cfg.strategy, FusionStrategy::kWeightedFusion);
  EXPECT_EQ(cfg.iou_cluster_threshold, 0.55);
  EXPECT_EQ(cfg.min_votes, 2u);
  EXPECT_EQ(cfg.skip_box_threshold, 0.1);
  EXPECT_EQ(cfg.WeightOf("yolo_416"), 0.5);
  EXPECT_EQ(cfg.WeightOf("other"), 1.0);

  EXPECT_EQ(CodeOf([] { ParseFusionConfig("strategy = soft_nms\n"); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { ParseFusionConfig("bogus = 1\n"); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { ParseFusionConfig("min_votes\n"); }),
            ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace rddeval
