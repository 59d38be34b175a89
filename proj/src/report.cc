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
#include "rddeval/report.h"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "rddeval/error.h"
#include "text_util.h"

namespace rddeval {
namespace {

using internal::FormatFixed;
using internal::FormatShortest;

constexpr int kDisplayDecimals = 4;

// Left-aligned columns separated by two spaces, no trailing blanks.
std::string AlignRows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line.append(widths[c] - row[c].size() + 2, ' ');
    }
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<std::string> LevelRow(std::string_view name,
                                  const LevelMetrics& m) {
  return {std::string(name),
          std::to_string(m.counts.tp),
          std::to_string(m.counts.fp),
          std::to_string(m.counts.fn),
          FormatFixed(m.scores.precision, kDisplayDecimals),
          FormatFixed(m.scores.recall, kDisplayDecimals),
          FormatFixed(m.scores.f1, kDisplayDecimals)};
}

nlohmann::ordered_json LevelJson(const LevelMetrics& m) {
  nlohmann::ordered_json j;
  j["tp"] = m.counts.tp;
  j["fp"] = m.counts.fp;
  j["fn"] = m.counts.fn;
  j["precision"] = m.scores.precision;
  j["recall"] = m.scores.recall;
  j["f1"] = m.scores.f1;
  return j;
}

}  // namespace

std::string RenderTable(std::span<const ComparisonRow> rows) {
  if (rows.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "comparison table has no rows");
  }
  std::set<std::string_view> names;
  for (const auto& r : rows) {
    if (!names.insert(r.name).second) {
      throw Error(ErrorCode::kDuplicateName,
                  "row name '" + r.name + "' appears more than once");
    }
    for (auto v : {std::optional<double>(r.f1_test1), r.f1_test2}) {
      if (v && !(*v >= 0.0 && *v <= 1.0)) {
        throw Error(ErrorCode::kInvalidConfig,
                    "F1 of '" + r.name + "' outside [0, 1]");
      }
    }
  }

  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Model", "F1 (test1)", "F1 (test2)"});
  for (const auto& r : rows) {
    cells.push_back({r.name, FormatFixed(r.f1_test1, kDisplayDecimals),
                     r.f1_test2 ? FormatFixed(*r.f1_test2, kDisplayDecimals)
                                : "-"});
  }
  return AlignRows(cells);
}

std::string EmitCurve(std::span<const CurvePoint> curve) {
  std::string out = "threshold,precision,recall,f1\n";
  for (const auto& p : curve) {
    out += FormatShortest(p.threshold) + ',' + FormatShortest(p.precision) +
           ',' + FormatShortest(p.recall) + ',' + FormatShortest(p.f1) + '\n';
  }
  return out;
}

std::vector<CurvePoint> ParseCurve(std::string_view csv) {
  const auto lines = internal::SplitLines(csv);
  if (lines.empty() || internal::Trim(lines[0]) != "threshold,precision,recall,f1") {
    throw Error(ErrorCode::kParseError, "curve CSV: missing header");
  }
  std::vector<CurvePoint> curve;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (internal::Trim(lines[i]).empty()) continue;
    const auto fields = internal::Split(lines[i], ',');
    double v[4];
    bool ok = fields.size() == 4;
    for (std::size_t k = 0; ok && k < 4; ++k) {
      const auto parsed = internal::ParseDouble(internal::Trim(fields[k]));
      ok = parsed.has_value();
      if (ok) v[k] = *parsed;
    }
    if (!ok) {
      throw Error(ErrorCode::kParseError,
                  "curve CSV: bad row at line " + std::to_string(i + 1));
    }
    curve.push_back({v[0], v[1], v[2], v[3]});
  }
  return curve;
}

std::string RenderMetricsText(const MetricsReport& report, bool per_class,
                              bool per_country) {
  std::string out;
  out += "images " + std::to_string(report.images) + '\n';
  out += "tp " + std::to_string(report.counts.tp) + '\n';
  out += "fp " + std::to_string(report.counts.fp) + '\n';
  out += "fn " + std::to_string(report.counts.fn) + '\n';
  out += "precision " + FormatFixed(report.scores.precision, kDisplayDecimals) +
         '\n';
  out += "recall " + FormatFixed(report.scores.recall, kDisplayDecimals) + '\n';
  out += "f1 " + FormatFixed(report.scores.f1, kDisplayDecimals) + '\n';

  const std::vector<std::string> header = {"", "tp", "fp", "fn",
                                           "precision", "recall", "f1"};
  if (per_class) {
    std::vector<std::vector<std::string>> rows = {header};
    rows[0][0] = "class";
    for (const auto& [cls, m] : report.per_class) {
      rows.push_back(LevelRow(ToString(cls), m));
    }
    out += "\n[per-class]\n" + AlignRows(rows);
  }
  if (per_country) {
    std::vector<std::vector<std::string>> rows = {header};
    rows[0][0] = "country";
    for (const auto& [country, m] : report.per_country) {
      rows.push_back(LevelRow(ToString(country), m));
    }
    out += "\n[per-country]\n" + AlignRows(rows);
  }
  return out;
}

std::string RenderMetricsJson(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["images"] = report.images;
  j["tp"] = report.counts.tp;
  j["fp"] = report.counts.fp;
  j["fn"] = report.counts.fn;
  j["precision"] = report.scores.precision;
  j["recall"] = report.scores.recall;
  j["f1"] = report.scores.f1;
  auto& classes = j["per_class"] = nlohmann::ordered_json::object();
  for (const auto& [cls, m] : report.per_class) {
    classes[std::string(ToString(cls))] = LevelJson(m);
  }
  auto& countries = j["per_country"] = nlohmann::ordered_json::object();
  for (const auto& [country, m] : report.per_country) {
    countries[std::string(ToString(country))] = LevelJson(m);
  }
  return j.dump(2) + '\n';
}

std::string RenderDatasetStats(const DatasetStats& stats) {
  std::string out;
  out += "images " + std::to_string(stats.total_images) + '\n';
  for (const auto& [country, n] : stats.images_per_country) {
    out += "images." + std::string(ToString(country)) + ' ' +
           std::to_string(n) + '\n';
  }
  out += "boxes " + std::to_string(stats.total_boxes) + '\n';
  for (const auto& [cls, n] : stats.boxes_per_class) {
    out += "boxes." + std::string(ToString(cls)) + ' ' + std::to_string(n) +
           '\n';
  }
  return out;
}

}  // namespace rddeval
