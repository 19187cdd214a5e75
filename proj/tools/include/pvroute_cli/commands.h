// Copyright 2026 The pvroute Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PVROUTE_CLI_COMMANDS_H_
#define PVROUTE_CLI_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace pvroute::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kConfigError = 2 };

// Parses argv and runs one subcommand. Messages go to `out` / `err`.
int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err);

}  // namespace pvroute::cli

#endif  // PVROUTE_CLI_COMMANDS_H_
