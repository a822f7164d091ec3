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

#ifndef MAYOR_TOOLS_CLI_CONFIG_H_
#define MAYOR_TOOLS_CLI_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mayor/assignment.h"
#include "mayor/data.h"
#include "mayor/eval.h"
#include "mayor/mask_head.h"
#include "mayor/recipes.h"

namespace mayor::cli {

/// Everything a subcommand may read. Defaults follow the library defaults
/// except where noted in the schema docs.
struct ExperimentConfig {
  std::uint64_t seed = 0;

  SynthConfig synth;
  int train_scenes = 200;
  int test_scenes = 50;

  AnchorGridConfig anchors;

  StandardAssignConfig standard;
  int k = kDefaultTopK;
  MatchingLossMode loss_mode = MatchingLossMode::kBoth;
  std::vector<int> ks{3, 5, 7, 9, 11, 13, 15};
  std::vector<std::vector<double>> ratio_sets{{1.0}, {0.5, 1.0, 2.0}, {0.25, 0.5, 1.0, 2.0, 4.0}};
  SynthRpnConfig rpn;

  DecoderKind decoder = DecoderKind::kFcFc;
  HeadShape head{14, 3, 16, 28, 256};
  LearningMode mode = LearningMode::kPixelAligned;

  TrainConfig train{0.5, 0.9, 1200, 150, 16};
  JitterConfig train_jitter{0.2, 0.2, 4, 0};

  double match_iou = kDefaultMatchIou;
  PredictConfig predict;
  std::vector<double> angles{0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0};
  BoxSource box_source = BoxSource::kGroundTruth;
  JitterConfig eval_jitter{0.1, 0.1, 1, 0};

  HeadShape flops_head{14, 3, 256, 28, 1024};
  std::size_t flops_proposals = 100;
};

struct ConfigKey {
  std::string name;  // "section.key"
  std::string doc;
};

/// Every accepted key with a one-line description, in file order.
const std::vector<ConfigKey>& config_schema();

/// Sets one "section.key" from text. Throws std::invalid_argument naming the
/// key for unknown keys and malformed values.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Reads an INI file over the defaults. Throws std::invalid_argument naming the
/// file and key on unknown keys or bad values.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical INI text: every key, schema order, shortest round-trip numbers.
std::string to_ini(const ExperimentConfig& cfg);

/// Hex FNV-1a of to_ini(cfg).
std::string config_hash(const ExperimentConfig& cfg);

/// Throws std::invalid_argument if values are inconsistent.
void validate(const ExperimentConfig& cfg);

/// Seed of an independent random stream derived from the root seed.
enum class Stream : std::uint64_t {
  kTrainScenes = 1,
  kTestScenes,
  kTrainJitter,
  kInit,
  kShuffle,
  kEvalJitter,
  kRpn,
};
std::uint64_t stream_seed(const ExperimentConfig& cfg, Stream stream);

}  // namespace mayor::cli

#endif  // MAYOR_TOOLS_CLI_CONFIG_H_
