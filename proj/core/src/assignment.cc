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

#include "mayor/assignment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mayor/parallel.h"

namespace mayor {

void AnchorGridConfig::Validate() const {
  if (image.width < 1 || image.height < 1) {
    throw std::invalid_argument("AnchorGridConfig: image must be at least 1x1");
  }
  if (strides.empty() || strides.size() != scales.size()) {
    throw std::invalid_argument("AnchorGridConfig: need one scale per stride level");
  }
  for (int s : strides) {
    if (s < 1) throw std::invalid_argument("AnchorGridConfig: strides must be positive");
  }
  for (double s : scales) {
    if (!(s > 0.0)) throw std::invalid_argument("AnchorGridConfig: scales must be positive");
  }
  if (aspect_ratios.empty()) {
    throw std::invalid_argument("AnchorGridConfig: at least one aspect ratio required");
  }
  for (double r : aspect_ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("AnchorGridConfig: ratios must be positive");
  }
}

std::vector<Anchor> generate_anchors(const AnchorGridConfig& cfg) {
  cfg.Validate();
  std::vector<Anchor> anchors;
  for (std::size_t level = 0; level < cfg.strides.size(); ++level) {
    const int stride = cfg.strides[level];
    const double scale = cfg.scales[level];
    const int rows = std::max(1, (cfg.image.height + stride - 1) / stride);
    const int cols = std::max(1, (cfg.image.width + stride - 1) / stride);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double cx = (c + 0.5) * stride;
        const double cy = (r + 0.5) * stride;
        for (double ratio : cfg.aspect_ratios) {
          const double w = scale / std::sqrt(ratio);
          const double h = scale * std::sqrt(ratio);
          anchors.push_back(
              Anchor{AABox::FromCenter(cx, cy, w, h), static_cast<int>(level), r, c});
        }
      }
    }
  }
  return anchors;
}

BoxDelta encode_delta(const AABox& anchor, const AABox& gt) {
  if (!(anchor.width() > 0.0) || !(anchor.height() > 0.0) || !(gt.width() > 0.0) ||
      !(gt.height() > 0.0)) {
    throw std::invalid_argument("encode_delta: boxes must have positive extent");
  }
  return {(gt.center_x() - anchor.center_x()) / anchor.width(),
          (gt.center_y() - anchor.center_y()) / anchor.height(),
          std::log(gt.width() / anchor.width()), std::log(gt.height() / anchor.height())};
}

AABox decode_delta(const AABox& anchor, const BoxDelta& d) {
  static const double kMaxLog = std::log(1000.0);
  const double cx = anchor.center_x() + d[0] * anchor.width();
  const double cy = anchor.center_y() + d[1] * anchor.height();
  const double w = anchor.width() * std::exp(std::min(d[2], kMaxLog));
  const double h = anchor.height() * std::exp(std::min(d[3], kMaxLog));
  return AABox::FromCenter(cx, cy, w, h);
}

std::vector<double> iou_table(std::span<const Anchor> anchors, std::span<const AABox> gts,
                              int jobs) {
  std::vector<double> table(anchors.size() * gts.size());
  parallel_for(anchors.size(), jobs, [&](std::size_t a) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      table[a * gts.size() + g] = box_iou(anchors[a].box, gts[g]);
    }
  });
  return table;
}

namespace {

AssignmentResult Empty(std::size_t n) {
  AssignmentResult r;
  r.labels.assign(n, AnchorLabel::kNegative);
  r.matched_gt.assign(n, std::nullopt);
  return r;
}

void FillUnmatched(AssignmentResult& r, std::size_t gt_count) {
  const auto counts = positives_per_gt(r, gt_count);
  r.unmatched_gts.clear();
  for (std::size_t g = 0; g < gt_count; ++g) {
    if (counts[g] == 0) r.unmatched_gts.push_back(g);
  }
}

}  // namespace

AssignmentResult standard_assign(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                 const StandardAssignConfig& cfg, int jobs) {
  if (cfg.negative_threshold > cfg.positive_threshold) {
    throw std::invalid_argument("standard_assign: negative threshold exceeds positive");
  }
  AssignmentResult result = Empty(anchors.size());
  if (gts.empty()) return result;
  const std::size_t n_gt = gts.size();
  const std::vector<double> iou = iou_table(anchors, gts, jobs);
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    std::size_t best = 0;
    for (std::size_t g = 1; g < n_gt; ++g) {
      if (iou[a * n_gt + g] > iou[a * n_gt + best]) best = g;
    }
    const double best_iou = iou[a * n_gt + best];
    if (best_iou > cfg.positive_threshold) {
      result.labels[a] = AnchorLabel::kPositive;
      result.matched_gt[a] = best;
    } else if (best_iou < cfg.negative_threshold) {
      result.labels[a] = AnchorLabel::kNegative;
    } else {
      result.labels[a] = AnchorLabel::kIgnore;
    }
  }
  if (cfg.rescue_low_quality && !anchors.empty()) {
    for (std::size_t g = 0; g < n_gt; ++g) {
      std::size_t best = 0;
      for (std::size_t a = 1; a < anchors.size(); ++a) {
        if (iou[a * n_gt + g] > iou[best * n_gt + g]) best = a;
      }
      if (iou[best * n_gt + g] > cfg.negative_threshold) {
        result.labels[best] = AnchorLabel::kPositive;
        result.matched_gt[best] = g;
      }
    }
  }
  FillUnmatched(result, n_gt);
  return result;
}

std::vector<std::vector<std::size_t>> pre_assign(std::span<const Anchor> anchors,
                                                 std::span<const AABox> gts, int jobs) {
  std::vector<std::vector<std::size_t>> candidates(gts.size());
  if (gts.empty()) return candidates;
  const std::size_t n_gt = gts.size();
  const std::vector<double> iou = iou_table(anchors, gts, jobs);
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    std::size_t best = 0;
    for (std::size_t g = 1; g < n_gt; ++g) {
      if (iou[a * n_gt + g] > iou[a * n_gt + best]) best = g;
    }
    if (iou[a * n_gt + best] > 0.0) candidates[best].push_back(a);
  }
  return candidates;
}

double matching_loss(std::size_t anchor_index, const AABox& gt, const PredictionSnapshot& pred,
                     std::span<const Anchor> anchors, MatchingLossMode mode) {
  if (anchor_index >= anchors.size() || anchor_index >= pred.objectness.size() ||
      anchor_index >= pred.deltas.size()) {
    throw std::out_of_range("matching_loss: anchor index out of range");
  }
  double loss = 0.0;
  if (mode != MatchingLossMode::kLocalizationOnly) {
    const double p = std::clamp(pred.objectness[anchor_index], kObjectnessClamp,
                                1.0 - kObjectnessClamp);
    loss += -std::log(p);
  }
  if (mode != MatchingLossMode::kObjectnessOnly) {
    const BoxDelta target = encode_delta(anchors[anchor_index].box, gt);
    for (int k = 0; k < 4; ++k) {
      const double x = std::abs(pred.deltas[anchor_index][static_cast<std::size_t>(k)] -
                                target[static_cast<std::size_t>(k)]);
      loss += x < 1.0 ? 0.5 * x * x : x - 0.5;
    }
  }
  return loss;
}

AssignmentResult adaptive_assign(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                 const PredictionSnapshot& pred, int k, MatchingLossMode mode,
                                 int jobs) {
  if (k < 1) throw std::invalid_argument("adaptive_assign: k must be >= 1");
  if (pred.objectness.size() != anchors.size() || pred.deltas.size() != anchors.size()) {
    throw std::invalid_argument("adaptive_assign: prediction size differs from anchor count");
  }
  AssignmentResult result = Empty(anchors.size());
  const auto candidates = pre_assign(anchors, gts, jobs);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const auto& cand = candidates[g];
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(cand.size());
    for (std::size_t a : cand) scored.emplace_back(matching_loss(a, gts[g], pred, anchors, mode), a);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end());
    for (std::size_t i = 0; i < take; ++i) {
      result.labels[scored[i].second] = AnchorLabel::kPositive;
      result.matched_gt[scored[i].second] = g;
    }
  }
  FillUnmatched(result, gts.size());
  return result;
}

std::vector<std::size_t> positives_per_gt(const AssignmentResult& result, std::size_t gt_count) {
  std::vector<std::size_t> counts(gt_count, 0);
  for (std::size_t a = 0; a < result.labels.size(); ++a) {
    if (result.labels[a] == AnchorLabel::kPositive && result.matched_gt[a] &&
        *result.matched_gt[a] < gt_count) {
      ++counts[*result.matched_gt[a]];
    }
  }
  return counts;
}

}  // namespace mayor
