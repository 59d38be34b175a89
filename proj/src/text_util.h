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
#ifndef RDDEVAL_SRC_TEXT_UTIL_H_
#define RDDEVAL_SRC_TEXT_UTIL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rddeval::internal {

std::string_view Trim(std::string_view s);

// Splits on LF, dropping a trailing CR from each line. A final empty line
// produced by a trailing newline is not returned.
std::vector<std::string_view> SplitLines(std::string_view text);

// Splits on runs of spaces and tabs.
std::vector<std::string_view> SplitWhitespace(std::string_view s);

std::vector<std::string_view> Split(std::string_view s, char sep);

// Full-token parses; nullopt on trailing garbage or overflow.
std::optional<double> ParseDouble(std::string_view s);
std::optional<long long> ParseInt(std::string_view s);

// Shortest representation that parses back to the same double.
std::string FormatShortest(double value);

// Fixed-point with `decimals` digits after the point.
std::string FormatFixed(double value, int decimals);

}  // namespace rddeval::internal

#endif  // RDDEVAL_SRC_TEXT_UTIL_H_
