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

#ifndef MAYOR_TOOLS_CLI_COMMANDS_H_
#define MAYOR_TOOLS_CLI_COMMANDS_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "config.h"

namespace mayor::cli {

struct RunContext {
  ExperimentConfig config;
  int jobs = 1;
  std::ostream* log = nullptr;
};

namespace fs = std::filesystem;

/// `<out>/train`, `<out>/test`, `<out>/manifest.json`.
void cmd_synth(const RunContext& ctx, const fs::path& out);
/// Rotates one split directory.
void cmd_rotate(const RunContext& ctx, const fs::path& data, double angle, const fs::path& out);
/// `<out>/assign_bench.csv` over the test split.
void cmd_assign_bench(const RunContext& ctx, const fs::path& data, const fs::path& out);
/// `<out>/model.bin` and `<out>/history.csv` from the train split.
void cmd_train(const RunContext& ctx, const fs::path& data, const fs::path& out);
/// `<out>/report.json` and `<out>/report.csv` for a model, or for annotation
/// files used as detections when `model` is empty.
void cmd_eval(const RunContext& ctx, const fs::path& data, const fs::path& model,
              const fs::path& detections, const fs::path& out);
/// `<out>/sweep_<label>.csv`, `<out>/sweep.json` and `<out>/sweep.svg`.
void cmd_rotbench(const RunContext& ctx, const fs::path& data,
                  const std::vector<std::pair<std::string, fs::path>>& models, const fs::path& out);
/// `<out>/flops.csv`; totals are also written to the log.
void cmd_flops(const RunContext& ctx, const fs::path& out);

/// `<out>/stamp.json`: command, seed, config hash, tool version.
void write_stamp(const RunContext& ctx, const std::string& command, const fs::path& out);

}  // namespace mayor::cli

#endif  // MAYOR_TOOLS_CLI_COMMANDS_H_
