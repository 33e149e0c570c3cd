// Copyright 2026 The Audiodist Authors. All Rights Reserved.
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

#ifndef AUDIODIST_CLI_H_
#define AUDIODIST_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace audiodist {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

inline constexpr const char* kNpyFormatVersion = "1.0";
inline constexpr int kManifestFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

// Entry point of the `audiodist` tool: subcommands embed, dist, synth,
// batch and eval. `args` excludes the program name. Results go to `out`,
// warnings and errors to `err`. Returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace audiodist

#endif  // AUDIODIST_CLI_H_
