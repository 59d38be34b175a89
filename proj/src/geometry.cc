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
#include "rddeval/geometry.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rddeval/error.h"

namespace rddeval {

bool BBox::IsValid(double xmin, double ymin, double xmax, double ymax) {
  for (double v : {xmin, ymin, xmax, ymax}) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return xmin < xmax && ymin < ymax;
}

std::optional<BBox> BBox::TryCreate(double xmin, double ymin, double xmax,
                                    double ymax) {
  if (!IsValid(xmin, ymin, xmax, ymax)) return std::nullopt;
  return BBox(xmin, ymin, xmax, ymax);
}

BBox BBox::Create(double xmin, double ymin, double xmax, double ymax) {
  if (!IsValid(xmin, ymin, xmax, ymax)) {
    std::ostringstream msg;
    msg << "box (" << xmin << ", " << ymin << ", " << xmax << ", " << ymax
        << ") must have finite non-negative coordinates with xmin < xmax and "
           "ymin < ymax";
    throw Error(ErrorCode::kInvalidBox, msg.str());
  }
  return BBox(xmin, ymin, xmax, ymax);
}

double Area(const BBox& box) { return box.width() * box.height(); }

double IntersectionArea(const BBox& a, const BBox& b) {
  const double w =
      std::min(a.xmax(), b.xmax()) - std::max(a.xmin(), b.xmin());
  const double h =
      std::min(a.ymax(), b.ymax()) - std::max(a.ymin(), b.ymin());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double Iou(const BBox& a, const BBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = Area(a) + Area(b) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace rddeval
