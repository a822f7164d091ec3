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

#ifndef MAYOR_RECIPES_H_
#define MAYOR_RECIPES_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mayor/assignment.h"
#include "mayor/data.h"
#include "mayor/eval.h"
#include "mayor/mask_head.h"
#include "mayor/mask_targets.h"

namespace mayor {

/// An instance counts as inside a proposal when its pixels cover at least
/// this fraction of the proposal area.
inline constexpr double kMultiInstanceCover = 0.05;

/// Jittered proposals around every non-ignore instance, turned into training
/// or evaluation samples. Proposal seeds derive from jitter.seed and the image
/// id, so the result does not depend on `jobs` or dataset order.
std::vector<RoISample> make_roi_samples(std::span<const ImageRecord> dataset,
                                        const JitterConfig& jitter, LearningMode mode,
                                        SampleDims dims, int jobs = 1);

/// Fraction of the jittered proposals that hold two or more instances.
double multi_instance_fraction(std::span<const ImageRecord> dataset, const JitterConfig& jitter,
                               double min_cover = kMultiInstanceCover, int jobs = 1);

/// IoU of the thresholded prediction against the target grid; 1 when both are
/// empty.
double grid_iou(std::span<const double> logits, const MaskTarget& target,
                double threshold = kDefaultMaskThreshold);
double mean_grid_iou(const MaskHeadModel& model, std::span<const RoISample> samples, int jobs = 1);

/// Rotates each record by a seeded uniform angle in [lo, hi] degrees.
std::vector<ImageRecord> augment_rotations(std::span<const ImageRecord> dataset, Range angles,
                                           std::uint64_t seed, int jobs = 1);

/// Per-decoder mask quality under identical data, seed and schedule.
struct DecoderStudyConfig {
  SynthConfig synth;
  int train_scenes = 64;
  int test_scenes = 16;
  JitterConfig jitter{0.15, 0.15, 4, 0};
  HeadShape shape{14, 3, 16, 28, 256};
  TrainConfig train;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int jobs = 1;
};

struct DecoderStudyRun {
  std::uint64_t seed = 0;
  /// Held-out mean grid IoU, indexed like kAllDecoderKinds.
  std::array<double, 4> mean_iou{};
  std::array<double, 4> final_loss{};
};

struct DecoderStudyResult {
  double multi_instance_fraction = 0.0;
  std::vector<DecoderStudyRun> runs;
};

DecoderStudyResult run_decoder_study(const DecoderStudyConfig& cfg);

/// FcFc trained with instance-aware and with pixel-aligned targets, then
/// evaluated with ground-truth boxes on rotated held-out scenes.
struct RotationStudyConfig {
  SynthConfig synth;
  int train_scenes = 64;
  int test_scenes = 16;
  /// Training scenes are rotated by a seeded angle drawn from this range.
  Range augment_angles{-90.0, 90.0};
  JitterConfig jitter{0.15, 0.15, 4, 0};
  HeadShape shape{14, 3, 16, 28, 256};
  TrainConfig train;
  std::vector<double> angles{0.0, 45.0};
  PredictConfig predict;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct RotationStudyResult {
  SweepReport instance_aware;
  SweepReport pixel_aligned;
};

RotationStudyResult run_rotation_study(const RotationStudyConfig& cfg);

/// Stand-in for a trained RPN: each anchor's best ground truth drives its
/// objectness, sigmoid(sharpness * (IoU - 0.5) + N(0, objectness_noise)), and
/// its deltas, the exact encoding plus N(0, delta_noise * (1 - IoU)).
struct SynthRpnConfig {
  double sharpness = 8.0;
  double objectness_noise = 0.5;
  double delta_noise = 0.3;
};

PredictionSnapshot synthesize_rpn(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                  const SynthRpnConfig& cfg, std::uint64_t seed);

/// Proposals decoded from the positives of adaptive assignment and clipped to
/// the canvas, ordered by decreasing objectness (ties to the lower anchor
/// index), then reduced by greedy box NMS at `nms_threshold` as in RPN
/// post-processing. A threshold of 1 keeps every proposal.
std::vector<AABox> adaptive_proposals(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                      const PredictionSnapshot& pred, int k,
                                      MatchingLossMode mode, Size canvas,
                                      double nms_threshold = 0.7);

/// End-to-end F-measure as a function of the top-k size.
struct KSweepConfig {
  SynthConfig synth;
  int train_scenes = 64;
  int test_scenes = 16;
  JitterConfig jitter{0.15, 0.15, 4, 0};
  HeadShape shape{14, 3, 16, 28, 256};
  TrainConfig train;
  AnchorGridConfig anchors;
  SynthRpnConfig rpn;
  std::vector<int> ks{3, 5, 7, 9, 11, 13, 15};
  MatchingLossMode loss_mode = MatchingLossMode::kBoth;
  double proposal_nms = 0.7;
  PredictConfig predict;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct KSweepEntry {
  int k = 0;
  double proposals_per_image = 0.0;
  EvalReport report;
};

std::vector<KSweepEntry> run_k_sweep(const KSweepConfig& cfg);

}  // namespace mayor

#endif  // MAYOR_RECIPES_H_
