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

#ifndef MAYOR_ASSIGNMENT_H_
#define MAYOR_ASSIGNMENT_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mayor/geometry.h"

namespace mayor {

struct Anchor {
  AABox box;
  int level = 0;
  int row = 0;
  int col = 0;
};

/// Anchor tiling. Level l has one cell per `strides[l]` pixels and anchors of
/// area `scales[l]^2`; `aspect_ratios` are height / width.
struct AnchorGridConfig {
  Size image{128, 128};
  std::vector<int> strides{8, 16};
  std::vector<double> scales{16.0, 32.0};
  std::vector<double> aspect_ratios{0.25, 0.5, 1.0, 2.0, 4.0};

  void Validate() const;
};

/// Ordered level-major, then row-major over cells, then by ratio.
std::vector<Anchor> generate_anchors(const AnchorGridConfig& cfg);

using BoxDelta = std::array<double, 4>;  // dx, dy, dw, dh

/// Throws std::invalid_argument if either box has non-positive extent.
BoxDelta encode_delta(const AABox& anchor, const AABox& gt);
/// dw and dh are clamped to ln(1000) before exponentiation.
AABox decode_delta(const AABox& anchor, const BoxDelta& delta);

enum class AnchorLabel { kNegative, kPositive, kIgnore };

struct AssignmentResult {
  std::vector<AnchorLabel> labels;
  /// Present iff the label is kPositive.
  std::vector<std::optional<std::size_t>> matched_gt;
  /// Ground truths that received no positive anchor.
  std::vector<std::size_t> unmatched_gts;
};

/// Dense |anchors| x |gts| IoU table, row-major by anchor.
std::vector<double> iou_table(std::span<const Anchor> anchors, std::span<const AABox> gts,
                              int jobs = 1);

struct StandardAssignConfig {
  double positive_threshold = 0.7;
  double negative_threshold = 0.3;
  /// Force each GT's best anchor positive when its IoU exceeds the negative
  /// threshold.
  bool rescue_low_quality = true;
};

AssignmentResult standard_assign(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                 const StandardAssignConfig& cfg = {}, int jobs = 1);

/// Candidate anchor indices per GT: every anchor with positive IoU, given to
/// its highest-IoU GT (lowest index on ties). Lists are ascending and
/// disjoint.
std::vector<std::vector<std::size_t>> pre_assign(std::span<const Anchor> anchors,
                                                 std::span<const AABox> gts, int jobs = 1);

/// Current RPN outputs. Objectness is clamped to [1e-6, 1 - 1e-6] on use.
struct PredictionSnapshot {
  std::vector<double> objectness;
  std::vector<BoxDelta> deltas;
};

enum class MatchingLossMode { kBoth, kLocalizationOnly, kObjectnessOnly };

inline constexpr double kObjectnessClamp = 1e-6;
inline constexpr int kDefaultTopK = 5;

/// BCE(objectness, 1) + smooth-L1 (beta 1) of the predicted delta against
/// encode_delta(anchor, gt), each term switchable by `mode`.
double matching_loss(std::size_t anchor_index, const AABox& gt, const PredictionSnapshot& pred,
                     std::span<const Anchor> anchors,
                     MatchingLossMode mode = MatchingLossMode::kBoth);

/// Two-step assignment: pre_assign, then the k lowest-loss candidates of each
/// GT become positives (ties to the lower anchor index); everything else is
/// negative.
AssignmentResult adaptive_assign(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                 const PredictionSnapshot& pred, int k = kDefaultTopK,
                                 MatchingLossMode mode = MatchingLossMode::kBoth, int jobs = 1);

/// Positive count per GT.
std::vector<std::size_t> positives_per_gt(const AssignmentResult& result, std::size_t gt_count);

}  // namespace mayor

#endif  // MAYOR_ASSIGNMENT_H_
