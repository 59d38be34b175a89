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
#ifndef RDDEVAL_REPORT_H_
#define RDDEVAL_REPORT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rddeval/dataset.h"
#include "rddeval/matching.h"
#include "rddeval/sweep.h"

namespace rddeval {

struct ComparisonRow {
  std::string name;
  double f1_test1 = 0.0;
  std::optional<double> f1_test2;
};

// Aligned plain-text model comparison with F1 at 4 decimals; an absent
// second score renders as "-". Throws Error(kDuplicateName) on repeated
// names and Error(kInvalidConfig) on an empty table or a score outside
// [0, 1].
std::string RenderTable(std::span<const ComparisonRow> rows);

// CSV `threshold,precision,recall,f1`, input order, shortest round-trip
// number formatting.
std::string EmitCurve(std::span<const CurvePoint> curve);
std::vector<CurvePoint> ParseCurve(std::string_view csv);

// Human-readable report. The headline block is one `key value` pair per
// line (`f1 0.6154`); breakdown sections follow when requested.
std::string RenderMetricsText(const MetricsReport& report, bool per_class,
                              bool per_country);

// Machine-readable JSON document with full-precision values:
//   {"images": n, "tp": .., "fp": .., "fn": .., "precision": ..,
//    "recall": .., "f1": .., "per_class": {"D00": {tp, fp, fn, precision,
//    recall, f1}, ...}, "per_country": {"Czech": {...}, ...}}
std::string RenderMetricsJson(const MetricsReport& report);

std::string RenderDatasetStats(const DatasetStats& stats);

}  // namespace rddeval

#endif  // RDDEVAL_REPORT_H_
