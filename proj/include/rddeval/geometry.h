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
#ifndef RDDEVAL_GEOMETRY_H_
#define RDDEVAL_GEOMETRY_H_

#include <optional>

namespace rddeval {

// Axis-aligned box in pixel coordinates, the closed region
// [xmin, xmax] x [ymin, ymax]. Width is xmax - xmin with no "+1" correction.
//
// Instances always have finite, non-negative coordinates and strictly
// positive area; degenerate or inverted boxes cannot be constructed.
class BBox {
 public:
  // Throws Error(kInvalidBox) when the coordinates violate the invariants.
  static BBox Create(double xmin, double ymin, double xmax, double ymax);
  static std::optional<BBox> TryCreate(double xmin, double ymin, double xmax,
                                       double ymax);
  static bool IsValid(double xmin, double ymin, double xmax, double ymax);

  double xmin() const { return xmin_; }
  double ymin() const { return ymin_; }
  double xmax() const { return xmax_; }
  double ymax() const { return ymax_; }
  double width() const { return xmax_ - xmin_; }
  double height() const { return ymax_ - ymin_; }

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  BBox(double xmin, double ymin, double xmax, double ymax)
      : xmin_(xmin), ymin_(ymin), xmax_(xmax), ymax_(ymax) {}

  double xmin_;
  double ymin_;
  double xmax_;
  double ymax_;
};

double Area(const BBox& box);

// Area of the overlap; 0 for disjoint boxes and boxes sharing only an edge.
double IntersectionArea(const BBox& a, const BBox& b);

// Intersection over union in [0, 1]. Exactly 1 for identical boxes.
double Iou(const BBox& a, const BBox& b);

}  // namespace rddeval

#endif  // RDDEVAL_GEOMETRY_H_
