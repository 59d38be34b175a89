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
#ifndef RDDEVAL_ERROR_H_
#define RDDEVAL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace rddeval {

enum class ErrorCode {
  kInvalidBox,
  kMalformedXml,
  kUnknownClass,
  kParseError,
  kConfidenceOutOfRange,
  kMixedImageIds,
  kEmptyEnsemble,
  kInvalidConfig,
  kDuplicateName,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported by throwing Error. The message is
// prefixed with the code name so diagnostics stay greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rddeval

#endif  // RDDEVAL_ERROR_H_
