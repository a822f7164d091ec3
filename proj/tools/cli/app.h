// Copyright 2026 The mayor-lab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MAYOR_TOOLS_CLI_APP_H_
#define MAYOR_TOOLS_CLI_APP_H_

#include <ostream>
#include <span>
#include <string>

namespace mayor::cli {

/// Runs one mayor_lab invocation; `args` excludes the program name. Returns
/// the process exit code.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace mayor::cli

#endif  // MAYOR_TOOLS_CLI_APP_H_
