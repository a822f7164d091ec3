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

#ifndef MAYOR_EVAL_H_
#define MAYOR_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mayor/data.h"
#include "mayor/geometry.h"
#include "mayor/mask_head.h"

namespace mayor {

inline constexpr double kDefaultMatchIou = 0.5;

struct MatchResult {
  /// (detection, ground truth) pairs in matching order.
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  std::vector<std::size_t> false_positives;
  /// Detections that only hit ignore regions; counted nowhere.
  std::vector<std::size_t> discarded;
  /// Non-ignore ground truths left unmatched.
  std::vector<std::size_t> missed;
};

/// Greedy one-to-one matching in descending score order (lower index first
/// on ties). Each detection takes the unmatched non-ignore instance of highest
/// IoU (lowest index on ties) if that IoU reaches the threshold.
MatchResult match_detections(std::span<const Detection> detections,
                             std::span<const TextInstance> instances,
                             double iou_threshold = kDefaultMatchIou,
                             double resolution = kDefaultIouResolution);

/// Harmonic mean; 0 when both are 0. Throws std::invalid_argument outside
/// [0, 1].
double f_measure(double recall, double precision);

struct ImageEval {
  std::string id;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

struct EvalReport {
  double recall = 0.0;
  double precision = 0.0;
  double f_measure = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  /// Sorted by image id.
  std::vector<ImageEval> per_image;
};

struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

/// Aggregates per-image matches. Images without a detections entry contribute
/// only false negatives. Precision with no counted detections is 0. Throws
/// std::invalid_argument for detections naming an unknown image.
EvalReport evaluate(std::span<const ImageDetections> detections,
                    std::span<const ImageRecord> ground_truth,
                    double iou_threshold = kDefaultMatchIou, int jobs = 1);

enum class BoxSource { kGroundTruth, kPredicted };

struct SweepConfig {
  std::vector<double> angles{0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0};
  BoxSource box_source = BoxSource::kGroundTruth;
  /// Proposal model for kPredicted: jittered copies of the ground-truth boxes.
  JitterConfig jitter{0.1, 0.1, 1, 0};
  PredictConfig predict;
  double iou_threshold = kDefaultMatchIou;
  int jobs = 1;
};

struct SweepEntry {
  double angle = 0.0;
  EvalReport report;
};

using SweepReport = std::vector<SweepEntry>;

/// For each angle: rotate the dataset, predict polygons from the chosen
/// proposals, evaluate.
SweepReport rotation_sweep(const MaskHeadModel& model, std::span<const ImageRecord> dataset,
                           const SweepConfig& cfg);

/// Proposals for one record under `source` (ignore instances excluded).
std::vector<AABox> sweep_proposals(const ImageRecord& record, BoxSource source,
                                   const JitterConfig& jitter);

/// "angle,recall,precision,f_measure,tp,fp,fn" with a header row.
std::string sweep_csv(const SweepReport& report);
std::string report_json(const EvalReport& report);
std::string sweep_json(const SweepReport& report);
/// Line plot of F-measure against angle, one line per labelled series.
std::string sweep_svg(std::span<const std::pair<std::string, SweepReport>> series);

}  // namespace mayor

#endif  // MAYOR_EVAL_H_
