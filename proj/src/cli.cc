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
#include "rddeval/cli.h"

#include <filesystem>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "rddeval/dataset.h"
#include "rddeval/error.h"
#include "rddeval/fusion.h"
#include "rddeval/matching.h"
#include "rddeval/parallel.h"
#include "rddeval/report.h"
#include "rddeval/sweep.h"
#include "text_util.h"

namespace rddeval::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  int threads = 0;
  bool strict = false;
};

DetectionFormat FormatFlag(const std::string& name) {
  const auto format = DetectionFormatFromName(name);
  if (!format) throw UsageError("unknown detection format '" + name + "'");
  return *format;
}

std::vector<Detection> LoadDetections(const std::string& path,
                                      DetectionFormat format) {
  return ParseDetections(ReadFile(path), format, path);
}

GroundTruthIndex LoadGroundTruth(const std::string& source,
                                 const CommonFlags& common, int threads,
                                 std::ostream& err) {
  std::vector<Warning> warnings;
  const auto annotations = LoadAnnotations(
      source, common.strict ? ClassPolicy::kStrict : ClassPolicy::kLenient,
      &warnings, threads);
  for (const auto& w : warnings) err << FormatWarning(w) << '\n';
  return BuildGroundTruthIndex(annotations);
}

void Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    WriteFile(path, text);
  }
}

// ---------------------------------------------------------------------------

struct EvalFlags {
  std::string gt;
  std::string det;
  std::string format = "submission";
  double iou = kDefaultIouThreshold;
  double conf = 0.0;
  bool per_class = false;
  bool per_country = false;
  std::string json_out;
};

void RunEval(const EvalFlags& f, const CommonFlags& common, std::ostream& out,
             std::ostream& err) {
  const int threads = ResolveThreadCount(common.threads);
  const auto format = FormatFlag(f.format);
  const auto gt = LoadGroundTruth(f.gt, common, threads, err);
  const auto dets = LoadDetections(f.det, format);
  const auto report = Evaluate(gt, dets, {f.conf, f.iou, threads});
  out << RenderMetricsText(report, f.per_class, f.per_country);
  if (!f.json_out.empty()) WriteFile(f.json_out, RenderMetricsJson(report));
}

// ---------------------------------------------------------------------------

struct FuseFlags {
  std::vector<std::string> dets;
  std::string format = "scored";
  std::optional<std::string> strategy;
  std::optional<double> iou_cluster;
  std::optional<std::size_t> min_votes;
  std::optional<double> skip_box;
  std::string weights;
  std::string config;
  std::string out;
};

// Model ids are file stems; a repeated stem gets a `#2`, `#3`, ... suffix.
std::vector<std::string> ModelIdsFor(const std::vector<std::string>& paths) {
  std::vector<std::string> ids;
  std::map<std::string, int> seen;
  for (const auto& p : paths) {
    std::string stem = fs::path(p).stem().string();
    if (stem.empty()) stem = "model";
    const int n = ++seen[stem];
    ids.push_back(n == 1 ? stem : stem + "#" + std::to_string(n));
  }
  return ids;
}

// "1,0.5,2" (one weight per --det, in order) or "id=w,id=w".
void ApplyWeights(const std::string& spec, const std::vector<std::string>& ids,
                  FusionConfig& cfg) {
  if (spec.empty()) return;
  const auto parts = internal::Split(spec, ',');
  const bool named = spec.find('=') != std::string::npos;
  if (!named && parts.size() != ids.size()) {
    throw UsageError("--weights lists " + std::to_string(parts.size()) +
                     " values for " + std::to_string(ids.size()) + " models");
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::string_view part = internal::Trim(parts[i]);
    std::string id = named ? "" : ids[i];
    if (named) {
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) {
        throw UsageError("--weights entry '" + std::string(part) +
                         "' is not id=weight");
      }
      id = std::string(internal::Trim(part.substr(0, eq)));
      part = internal::Trim(part.substr(eq + 1));
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        throw UsageError("--weights names unknown model '" + id + "'");
      }
    }
    const auto w = internal::ParseDouble(part);
    if (!w) throw UsageError("--weights value '" + std::string(part) + "'");
    cfg.model_weights[id] = *w;
  }
}

void RunFuse(const FuseFlags& f, const CommonFlags& common,
             std::ostream& out) {
  if (f.dets.empty()) {
    throw Error(ErrorCode::kEmptyEnsemble, "at least one --det is required");
  }
  const int threads = ResolveThreadCount(common.threads);
  const auto format = FormatFlag(f.format);

  FusionConfig cfg;
  if (!f.config.empty()) cfg = ParseFusionConfig(ReadFile(f.config));
  if (f.strategy) {
    const auto s = FusionStrategyFromName(*f.strategy);
    if (!s) throw UsageError("unknown strategy '" + *f.strategy + "'");
    cfg.strategy = *s;
  }
  if (f.iou_cluster) cfg.iou_cluster_threshold = *f.iou_cluster;
  if (f.min_votes) cfg.min_votes = *f.min_votes;
  if (f.skip_box) cfg.skip_box_threshold = *f.skip_box;

  const auto ids = ModelIdsFor(f.dets);
  ApplyWeights(f.weights, ids, cfg);

  DetectionSets sets;
  for (std::size_t i = 0; i < f.dets.size(); ++i) {
    auto dets = LoadDetections(f.dets[i], format);
    for (auto& d : dets) d.model_id = ids[i];
    sets[ids[i]] = std::move(dets);
  }
  Emit(f.out, WriteScored(Fuse(sets, cfg, threads)), out);
}

// ---------------------------------------------------------------------------

struct SweepFlags {
  std::string gt;
  std::string det;
  std::string format = "submission";
  std::string grid = "0:1:0.05";
  double iou = kDefaultIouThreshold;
  std::string curve_out;
};

void RunSweep(const SweepFlags& f, const CommonFlags& common,
              std::ostream& out, std::ostream& err) {
  const int threads = ResolveThreadCount(common.threads);
  const auto format = FormatFlag(f.format);
  const auto grid = ParseGrid(f.grid);
  const auto gt = LoadGroundTruth(f.gt, common, threads, err);
  const auto dets = LoadDetections(f.det, format);
  const auto result = SweepThreshold(gt, dets, grid, f.iou, threads);
  out << "best_threshold " << internal::FormatShortest(result.best_threshold)
      << '\n'
      << "precision " << internal::FormatFixed(result.best.precision, 4)
      << '\n'
      << "recall " << internal::FormatFixed(result.best.recall, 4) << '\n'
      << "f1 " << internal::FormatFixed(result.best.f1, 4) << '\n';
  if (!f.curve_out.empty()) WriteFile(f.curve_out, EmitCurve(result.curve));
}

// ---------------------------------------------------------------------------

void RunStats(const std::string& gt, const CommonFlags& common,
              std::ostream& out, std::ostream& err) {
  const int threads = ResolveThreadCount(common.threads);
  std::vector<Warning> warnings;
  const auto annotations = LoadAnnotations(
      gt, common.strict ? ClassPolicy::kStrict : ClassPolicy::kLenient,
      &warnings, threads);
  for (const auto& w : warnings) err << FormatWarning(w) << '\n';
  out << RenderDatasetStats(ComputeDatasetStats(annotations));
  if (!warnings.empty()) {
    err << "dropped " << warnings.size() << " object(s) outside D00/D10/D20/D40\n";
  }
}

// ---------------------------------------------------------------------------

struct ConvertFlags {
  std::string in;
  std::string in_format = "scored";
  std::string out;
  std::string out_format = "submission";
  double conf = 0.0;
  std::optional<std::size_t> max_per_image;
};

void RunConvert(const ConvertFlags& f, std::ostream& out) {
  const auto in_format = FormatFlag(f.in_format);
  const auto out_format = FormatFlag(f.out_format);
  const auto dets = LoadDetections(f.in, in_format);
  std::string text;
  if (out_format == DetectionFormat::kSubmission) {
    text = WriteSubmission(dets, f.conf, f.max_per_image);
  } else {
    std::vector<Detection> kept;
    for (auto& group : SelectForOutput(dets, f.conf, f.max_per_image)) {
      kept.insert(kept.end(), group.begin(), group.end());
    }
    text = WriteScored(kept);
  }
  Emit(f.out, text, out);
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kEmptyEnsemble:
    case ErrorCode::kDuplicateName:
    case ErrorCode::kIo:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Road-damage detection scoring and ensemble fusion", "rddeval"};
  app.require_subcommand(1);

  CommonFlags common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--threads", common.threads,
                    "Worker threads (default: $RDDEVAL_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  };
  auto add_strict = [&](CLI::App* cmd) {
    cmd->add_flag("--strict", common.strict,
                  "Fail on damage classes outside D00/D10/D20/D40");
  };

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score detections (F1)");
  eval_cmd->add_option("--gt", eval.gt, "VOC XML directory or list file")
      ->required();
  eval_cmd->add_option("--det", eval.det, "Detection file")->required();
  eval_cmd->add_option("--format", eval.format, "submission | scored")
      ->capture_default_str();
  eval_cmd->add_option("--iou", eval.iou, "IoU threshold (strict >)")
      ->capture_default_str();
  eval_cmd->add_option("--conf", eval.conf, "Confidence gate")
      ->capture_default_str();
  eval_cmd->add_flag("--per-class", eval.per_class);
  eval_cmd->add_flag("--per-country", eval.per_country);
  eval_cmd->add_option("--json", eval.json_out, "Write JSON report here");
  add_common(eval_cmd);
  add_strict(eval_cmd);

  FuseFlags fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse per-model detections");
  fuse_cmd->add_option("--det", fuse.dets, "Detection file of one model")
      ->required();
  fuse_cmd->add_option("--format", fuse.format, "submission | scored")
      ->capture_default_str();
  fuse_cmd->add_option("--strategy", fuse.strategy,
                       "union_nms | consensus | weighted_fusion");
  fuse_cmd->add_option("--iou-cluster", fuse.iou_cluster);
  fuse_cmd->add_option("--min-votes", fuse.min_votes);
  fuse_cmd->add_option("--skip-box", fuse.skip_box);
  fuse_cmd->add_option("--weights", fuse.weights,
                       "w1,w2,... in --det order, or id=w,...");
  fuse_cmd->add_option("--config", fuse.config, "key=value config file");
  fuse_cmd->add_option("--out", fuse.out, "Output scored file (default stdout)");
  add_common(fuse_cmd);

  SweepFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the confidence gate");
  sweep_cmd->add_option("--gt", sweep.gt)->required();
  sweep_cmd->add_option("--det", sweep.det)->required();
  sweep_cmd->add_option("--format", sweep.format)->capture_default_str();
  sweep_cmd->add_option("--grid", sweep.grid, "start:stop:step or a,b,c")
      ->capture_default_str();
  sweep_cmd->add_option("--iou", sweep.iou)->capture_default_str();
  sweep_cmd->add_option("--curve-out", sweep.curve_out, "CSV curve output");
  add_common(sweep_cmd);
  add_strict(sweep_cmd);

  std::string stats_gt;
  auto* stats_cmd = app.add_subcommand("stats", "Dataset composition");
  stats_cmd->add_option("--gt", stats_gt)->required();
  add_common(stats_cmd);
  add_strict(stats_cmd);

  ConvertFlags convert;
  auto* convert_cmd =
      app.add_subcommand("convert", "Convert between detection formats");
  convert_cmd->add_option("--in", convert.in)->required();
  convert_cmd->add_option("--in-format", convert.in_format)
      ->capture_default_str();
  convert_cmd->add_option("--out", convert.out, "Output file (default stdout)");
  convert_cmd->add_option("--out-format", convert.out_format)
      ->capture_default_str();
  convert_cmd->add_option("--conf", convert.conf)->capture_default_str();
  convert_cmd->add_option("--max-per-image", convert.max_per_image);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*eval_cmd) {
      RunEval(eval, common, out, err);
    } else if (*fuse_cmd) {
      RunFuse(fuse, common, out);
    } else if (*sweep_cmd) {
      RunSweep(sweep, common, out, err);
    } else if (*stats_cmd) {
      RunStats(stats_gt, common, out, err);
    } else if (*convert_cmd) {
      RunConvert(convert, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e.code());
  }
  out.flush();
  return kExitOk;
}

}  // namespace rddeval::cli
