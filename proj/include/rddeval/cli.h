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
#ifndef RDDEVAL_CLI_H_
#define RDDEVAL_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace rddeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one `rddeval <command> [flags]` invocation. `args` includes the
// program name. Primary output goes to `out`, diagnostics and warnings to
// `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace rddeval::cli

#endif  // RDDEVAL_CLI_H_
