// Copyright 2026 The entangle-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command-line front end: `entangle-bench <pair|order-test|chsh|sweep> [flags]`.
// Exit status: 0 when the run completed, 2 for a bad configuration, 3 for an
// unknown model. Statistical verdicts are data and never change the status.

#include <ostream>
#include <string>
#include <vector>

namespace entangle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitModelNotFound = 3;

inline constexpr const char *kSeedEnvVar = "ENTANGLE_BENCH_SEED";
inline constexpr unsigned long long kDefaultSeed = 1;

/// `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace entangle::cli
