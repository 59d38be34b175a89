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
#include "rddeval/error.h"

namespace rddeval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidBox:
      return "InvalidBox";
    case ErrorCode::kMalformedXml:
      return "MalformedXml";
    case ErrorCode::kUnknownClass:
      return "UnknownClass";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kConfidenceOutOfRange:
      return "ConfidenceOutOfRange";
    case ErrorCode::kMixedImageIds:
      return "MixedImageIds";
    case ErrorCode::kEmptyEnsemble:
      return "EmptyEnsemble";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kDuplicateName:
      return "DuplicateName";
    case ErrorCode::kIo:
      return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace rddeval
