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
#include "rddeval/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "rddeval/error.h"
#include "rddeval/parallel.h"
#include "text_util.h"

namespace rddeval {

using internal::ParseDouble;
using internal::ParseInt;
using internal::SplitLines;
using internal::SplitWhitespace;
using internal::Trim;

std::string_view ToString(DamageClass cls) {
  switch (cls) {
    case DamageClass::kD00:
      return "D00";
    case DamageClass::kD10:
      return "D10";
    case DamageClass::kD20:
      return "D20";
    case DamageClass::kD40:
      return "D40";
  }
  return "?";
}

std::optional<DamageClass> DamageClassFromCode(std::string_view code) {
  for (DamageClass cls : kAllDamageClasses) {
    if (ToString(cls) == code) return cls;
  }
  return std::nullopt;
}

int SubmissionClassId(DamageClass cls) { return static_cast<int>(cls) + 1; }

std::optional<DamageClass> DamageClassFromSubmissionId(int id) {
  if (id < 1 || id > static_cast<int>(kAllDamageClasses.size())) {
    return std::nullopt;
  }
  return kAllDamageClasses[id - 1];
}

std::string_view ToString(Country country) {
  switch (country) {
    case Country::kCzech:
      return "Czech";
    case Country::kIndia:
      return "India";
    case Country::kJapan:
      return "Japan";
    case Country::kUnknown:
      return "Unknown";
  }
  return "?";
}

Country CountryOf(std::string_view image_id) {
  Country best = Country::kUnknown;
  std::size_t best_len = 0;
  for (Country c : {Country::kCzech, Country::kIndia, Country::kJapan}) {
    const auto prefix = ToString(c);
    if (image_id.starts_with(prefix) && prefix.size() > best_len) {
      best = c;
      best_len = prefix.size();
    }
  }
  return best;
}

std::string FormatWarning(const Warning& warning) {
  std::ostringstream out;
  out << "WARN " << warning.file << ":" << warning.line << " "
      << warning.message;
  return out.str();
}

std::string StripImageExtension(std::string_view name) {
  const auto dot = name.rfind('.');
  if (dot == std::string_view::npos) return std::string(name);
  std::string ext(name.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == "jpg" || ext == "jpeg" || ext == "png" || ext == "bmp") {
    return std::string(name.substr(0, dot));
  }
  return std::string(name);
}

std::optional<DetectionFormat> DetectionFormatFromName(std::string_view name) {
  if (name == "submission") return DetectionFormat::kSubmission;
  if (name == "scored") return DetectionFormat::kScored;
  return std::nullopt;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
  }
}

// ---------------------------------------------------------------------------
// Pascal-VOC XML.

namespace {

int LineOfOffset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(),
                                         text.begin() + offset, '\n'));
}

// Line of the n-th (0-based) `<object>` start tag, skipping comments.
int LineOfObject(std::string_view xml, std::size_t n) {
  std::size_t pos = 0;
  std::size_t seen = 0;
  while (pos < xml.size()) {
    const auto lt = xml.find('<', pos);
    if (lt == std::string_view::npos) break;
    if (xml.substr(lt, 4) == "<!--") {
      const auto close = xml.find("-->", lt + 4);
      if (close == std::string_view::npos) break;
      pos = close + 3;
      continue;
    }
    if (xml.substr(lt, 7) == "<object" && lt + 7 < xml.size()) {
      const char next = xml[lt + 7];
      if (next == '>' || std::isspace(static_cast<unsigned char>(next))) {
        if (seen == n) return LineOfOffset(xml, lt);
        ++seen;
      }
    }
    pos = lt + 1;
  }
  return 0;
}

namespace pt = boost::property_tree;

[[noreturn]] void ThrowXml(std::string_view source, const std::string& what) {
  throw Error(ErrorCode::kMalformedXml, std::string(source) + ": " + what);
}

std::string RequiredText(const pt::ptree& node, const std::string& path,
                         std::string_view source) {
  const auto value = node.get_optional<std::string>(path);
  if (!value) ThrowXml(source, "missing <" + path + ">");
  return std::string(Trim(*value));
}

double RequiredNumber(const pt::ptree& node, const std::string& path,
                      std::string_view source) {
  const std::string text = RequiredText(node, path, source);
  const auto value = ParseDouble(text);
  if (!value) ThrowXml(source, "<" + path + "> is not a number: '" + text + "'");
  return *value;
}

}  // namespace

Annotation ParseVocAnnotation(std::string_view xml_text, ClassPolicy policy,
                              std::vector<Warning>* warnings,
                              std::string_view source) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml_text)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    ThrowXml(source, "line " + std::to_string(e.line()) + ": " + e.message());
  }

  const auto root = tree.get_child_optional("annotation");
  if (!root) ThrowXml(source, "missing <annotation> root");

  Annotation ann;
  const std::string filename = RequiredText(*root, "filename", source);
  if (filename.empty()) ThrowXml(source, "empty <filename>");
  ann.image_id = StripImageExtension(filename);
  ann.width = static_cast<int>(RequiredNumber(*root, "size.width", source));
  ann.height = static_cast<int>(RequiredNumber(*root, "size.height", source));

  std::size_t object_index = 0;
  for (const auto& [key, object] : *root) {
    if (key != "object") continue;
    const std::size_t this_object = object_index++;
    const std::string name = RequiredText(object, "name", source);
    const auto cls = DamageClassFromCode(name);
    const double xmin = RequiredNumber(object, "bndbox.xmin", source);
    const double ymin = RequiredNumber(object, "bndbox.ymin", source);
    const double xmax = RequiredNumber(object, "bndbox.xmax", source);
    const double ymax = RequiredNumber(object, "bndbox.ymax", source);
    if (!cls) {
      const int line = LineOfObject(xml_text, this_object);
      if (policy == ClassPolicy::kStrict) {
        throw Error(ErrorCode::kUnknownClass,
                    std::string(source) + ":" + std::to_string(line) +
                        ": unknown damage class '" + name + "'");
      }
      if (warnings) {
        warnings->push_back({std::string(source), line,
                             "dropped object with unknown class '" + name +
                                 "' in image " + ann.image_id});
      }
      continue;
    }
    const auto box = BBox::TryCreate(xmin, ymin, xmax, ymax);
    if (!box) {
      std::ostringstream msg;
      msg << source << ":" << LineOfObject(xml_text, this_object)
          << ": image " << ann.image_id << ": invalid box (" << xmin << ", "
          << ymin << ", " << xmax << ", " << ymax << ")";
      throw Error(ErrorCode::kInvalidBox, msg.str());
    }
    ann.boxes.push_back({ann.image_id, *cls, *box});
  }
  return ann;
}

std::vector<Annotation> LoadAnnotations(const std::filesystem::path& source,
                                        ClassPolicy policy,
                                        std::vector<Warning>* warnings,
                                        int threads) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(source, ec)) {
    for (const auto& entry : fs::recursive_directory_iterator(source)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (ext == ".xml") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(source, ec)) {
    const std::string listing = ReadFile(source);
    for (auto line : SplitLines(listing)) {
      line = Trim(line);
      if (line.empty() || line.front() == '#') continue;
      fs::path p(line);
      if (p.is_relative()) p = source.parent_path() / p;
      files.push_back(p);
    }
  } else {
    throw Error(ErrorCode::kIo,
                "ground truth source '" + source.string() + "' not found");
  }

  std::vector<Annotation> out(files.size());
  std::vector<std::vector<Warning>> per_file(files.size());
  ParallelFor(files.size(), threads, [&](std::size_t i) {
    out[i] = ParseVocAnnotation(ReadFile(files[i]), policy, &per_file[i],
                                files[i].string());
  });
  if (warnings) {
    for (auto& w : per_file) {
      warnings->insert(warnings->end(), w.begin(), w.end());
    }
  }
  return out;
}

DatasetStats ComputeDatasetStats(std::span<const Annotation> annotations) {
  DatasetStats stats;
  for (Country c : kAllCountries) stats.images_per_country[c] = 0;
  for (DamageClass c : kAllDamageClasses) stats.boxes_per_class[c] = 0;
  for (const auto& ann : annotations) {
    ++stats.images_per_country[CountryOf(ann.image_id)];
    ++stats.total_images;
    for (const auto& gt : ann.boxes) {
      ++stats.boxes_per_class[gt.cls];
      ++stats.total_boxes;
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Detection files.

namespace {

[[noreturn]] void ThrowAt(ErrorCode code, std::string_view source, int line,
                          const std::string& what) {
  throw Error(code,
              std::string(source) + ":" + std::to_string(line) + ": " + what);
}

BBox BoxAt(std::span<const std::string_view> coords, std::string_view source,
           int line) {
  double v[4];
  for (int k = 0; k < 4; ++k) {
    const auto parsed = ParseDouble(coords[k]);
    if (!parsed) {
      ThrowAt(ErrorCode::kParseError, source, line,
              "bad coordinate '" + std::string(coords[k]) + "'");
    }
    v[k] = *parsed;
  }
  const auto box = BBox::TryCreate(v[0], v[1], v[2], v[3]);
  if (!box) {
    std::ostringstream msg;
    msg << "invalid box (" << v[0] << ", " << v[1] << ", " << v[2] << ", "
        << v[3] << ")";
    ThrowAt(ErrorCode::kInvalidBox, source, line, msg.str());
  }
  return *box;
}

void ParseSubmissionLine(std::string_view text, std::string_view source,
                         int line, std::vector<Detection>& out) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    ThrowAt(ErrorCode::kParseError, source, line,
            "expected 'image_id,predictions'");
  }
  const std::string image_id =
      StripImageExtension(Trim(text.substr(0, comma)));
  if (image_id.empty()) {
    ThrowAt(ErrorCode::kParseError, source, line, "empty image id");
  }
  const auto tokens = SplitWhitespace(text.substr(comma + 1));
  if (tokens.size() % 5 != 0) {
    ThrowAt(ErrorCode::kParseError, source, line,
            "prediction string must hold groups of 5 values, got " +
                std::to_string(tokens.size()));
  }
  for (std::size_t i = 0; i < tokens.size(); i += 5) {
    const auto id = ParseInt(tokens[i]);
    const auto cls =
        id ? DamageClassFromSubmissionId(static_cast<int>(*id)) : std::nullopt;
    if (!cls) {
      ThrowAt(ErrorCode::kParseError, source, line,
              "class label must be 1..4, got '" + std::string(tokens[i]) +
                  "'");
    }
    Detection det{image_id, *cls,
                  BoxAt(std::span(tokens).subspan(i + 1, 4), source, line)};
    out.push_back(std::move(det));
  }
}

void ParseScoredLine(std::string_view text, std::string_view source, int line,
                     std::vector<Detection>& out) {
  const auto tokens = SplitWhitespace(text);
  if (tokens.size() != 7) {
    ThrowAt(ErrorCode::kParseError, source, line,
            "expected 7 fields 'image_id class confidence xmin ymin xmax "
            "ymax', got " +
                std::to_string(tokens.size()));
  }
  const auto cls = DamageClassFromCode(tokens[1]);
  if (!cls) {
    ThrowAt(ErrorCode::kParseError, source, line,
            "unknown damage class '" + std::string(tokens[1]) + "'");
  }
  const auto conf = ParseDouble(tokens[2]);
  if (!conf) {
    ThrowAt(ErrorCode::kParseError, source, line,
            "bad confidence '" + std::string(tokens[2]) + "'");
  }
  if (!(*conf >= 0.0 && *conf <= 1.0)) {
    ThrowAt(ErrorCode::kConfidenceOutOfRange, source, line,
            "confidence " + std::string(tokens[2]) + " outside [0, 1]");
  }
  Detection det{StripImageExtension(tokens[0]), *cls,
                BoxAt(std::span(tokens).subspan(3, 4), source, line), *conf};
  out.push_back(std::move(det));
}

std::string FormatRounded(double v) {
  return std::to_string(static_cast<long long>(std::floor(v + 0.5)));
}

}  // namespace

std::vector<Detection> ParseDetections(std::string_view text,
                                       DetectionFormat format,
                                       std::string_view source) {
  std::vector<Detection> out;
  int line_no = 0;
  for (const auto line : SplitLines(text)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    if (format == DetectionFormat::kSubmission) {
      ParseSubmissionLine(line, source, line_no, out);
    } else {
      ParseScoredLine(line, source, line_no, out);
    }
  }
  return out;
}

std::vector<std::vector<Detection>> SelectForOutput(
    std::span<const Detection> dets, double conf_threshold,
    std::optional<std::size_t> max_per_image) {
  std::vector<std::vector<std::size_t>> groups;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(dets[i].image_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  std::vector<std::vector<Detection>> out;
  out.reserve(groups.size());
  for (auto& idx : groups) {
    std::vector<Detection> kept;
    std::erase_if(idx, [&](std::size_t i) {
      return dets[i].confidence < conf_threshold;
    });
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].confidence > dets[b].confidence;
    });
    if (max_per_image && idx.size() > *max_per_image) {
      idx.resize(*max_per_image);
    }
    for (std::size_t i : idx) kept.push_back(dets[i]);
    out.push_back(std::move(kept));
  }
  return out;
}

std::string WriteSubmission(std::span<const Detection> dets,
                            double conf_threshold,
                            std::optional<std::size_t> max_per_image) {
  // Image order follows first appearance, including fully filtered images.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& d : dets) {
    if (seen.try_emplace(d.image_id, order.size()).second) {
      order.push_back(d.image_id);
    }
  }
  const auto groups = SelectForOutput(dets, conf_threshold, max_per_image);

  std::string out;
  for (std::size_t g = 0; g < order.size(); ++g) {
    out += order[g];
    out += ".jpg,";
    bool first = true;
    for (const auto& d : groups[g]) {
      if (!first) out += ' ';
      first = false;
      out += std::to_string(SubmissionClassId(d.cls));
      for (double v : {d.box.xmin(), d.box.ymin(), d.box.xmax(),
                       d.box.ymax()}) {
        out += ' ';
        out += FormatRounded(v);
      }
    }
    out += '\n';
  }
  return out;
}

std::string WriteScored(std::span<const Detection> dets) {
  using internal::FormatShortest;
  std::string out;
  for (const auto& d : dets) {
    out += d.image_id;
    out += ' ';
    out += ToString(d.cls);
    out += ' ';
    out += FormatShortest(d.confidence);
    for (double v : {d.box.xmin(), d.box.ymin(), d.box.xmax(),
                     d.box.ymax()}) {
      out += ' ';
      out += FormatShortest(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace rddeval
