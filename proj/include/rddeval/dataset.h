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
#ifndef RDDEVAL_DATASET_H_
#define RDDEVAL_DATASET_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rddeval/geometry.h"

namespace rddeval {

// The four road-damage categories scored by the challenge.
enum class DamageClass {
  kD00,  // longitudinal linear crack
  kD10,  // lateral linear crack
  kD20,  // alligator crack
  kD40,  // pothole
};

inline constexpr std::array<DamageClass, 4> kAllDamageClasses = {
    DamageClass::kD00, DamageClass::kD10, DamageClass::kD20,
    DamageClass::kD40};

std::string_view ToString(DamageClass cls);
std::optional<DamageClass> DamageClassFromCode(std::string_view code);
// Submission files number classes 1..4 in enum order.
int SubmissionClassId(DamageClass cls);
std::optional<DamageClass> DamageClassFromSubmissionId(int id);

enum class Country { kCzech, kIndia, kJapan, kUnknown };

inline constexpr std::array<Country, 4> kAllCountries = {
    Country::kCzech, Country::kIndia, Country::kJapan, Country::kUnknown};

std::string_view ToString(Country country);

// Longest matching prefix among "Czech", "India", "Japan"; case-sensitive.
Country CountryOf(std::string_view image_id);

struct GroundTruthBox {
  std::string image_id;
  DamageClass cls;
  BBox box;

  friend bool operator==(const GroundTruthBox&,
                         const GroundTruthBox&) = default;
};

inline constexpr std::string_view kDefaultModelId = "m0";

struct Detection {
  std::string image_id;
  DamageClass cls;
  BBox box;
  double confidence = 1.0;
  std::string model_id = std::string(kDefaultModelId);

  friend bool operator==(const Detection&, const Detection&) = default;
};

// One parsed Pascal-VOC file.
struct Annotation {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<GroundTruthBox> boxes;
};

struct DatasetStats {
  std::map<Country, std::size_t> images_per_country;
  std::map<DamageClass, std::size_t> boxes_per_class;
  std::size_t total_images = 0;
  std::size_t total_boxes = 0;
};

// Non-fatal input problem. Rendered as `WARN <file>:<line> <message>`.
struct Warning {
  std::string file;
  int line = 0;
  std::string message;
};

std::string FormatWarning(const Warning& warning);

// kLenient drops labels outside the four scored classes (the raw dataset
// also carries codes such as D43 and D50) and records a warning; kStrict
// throws Error(kUnknownClass).
enum class ClassPolicy { kLenient, kStrict };

// Strips a trailing image extension (.jpg, .jpeg, .png, .bmp; any case).
std::string StripImageExtension(std::string_view name);

Annotation ParseVocAnnotation(std::string_view xml_text, ClassPolicy policy,
                              std::vector<Warning>* warnings,
                              std::string_view source = "<memory>");

// Accepts a directory (searched recursively for *.xml, sorted by path) or a
// text file listing one XML path per line, relative paths resolved against
// the list file's directory. Files are parsed on up to `threads` workers;
// the result order and the warnings are independent of the worker count.
std::vector<Annotation> LoadAnnotations(const std::filesystem::path& source,
                                        ClassPolicy policy,
                                        std::vector<Warning>* warnings,
                                        int threads = 1);

DatasetStats ComputeDatasetStats(std::span<const Annotation> annotations);

enum class DetectionFormat {
  // `image_id,label xmin ymin xmax ymax [label xmin ymin xmax ymax ...]`
  // with labels 1..4 and no confidences.
  kSubmission,
  // `image_id class confidence xmin ymin xmax ymax`, one box per line.
  kScored,
};

std::optional<DetectionFormat> DetectionFormatFromName(std::string_view name);

std::vector<Detection> ParseDetections(std::string_view text,
                                       DetectionFormat format,
                                       std::string_view source = "<memory>");

// Drops detections below `conf_threshold` and, per image, keeps at most
// `max_per_image` boxes. Images keep their first-appearance order and boxes
// within an image are ordered by descending confidence, then input order.
std::vector<std::vector<Detection>> SelectForOutput(
    std::span<const Detection> dets, double conf_threshold,
    std::optional<std::size_t> max_per_image);

// One line per input image (even when every box was filtered out).
// Coordinates are rounded half-up to integers.
std::string WriteSubmission(std::span<const Detection> dets,
                            double conf_threshold,
                            std::optional<std::size_t> max_per_image);

// One line per detection, in input order, numbers in shortest round-trip
// form.
std::string WriteScored(std::span<const Detection> dets);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace rddeval

#endif  // RDDEVAL_DATASET_H_
