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

#include "mayor/recipes.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mayor/parallel.h"
#include "mayor/random.h"

namespace mayor {
namespace {

// Stream tags for seeds derived from one root seed.
enum Stream : std::uint64_t { kTrainData = 1, kTestData, kJitter, kInit, kShuffle, kAugment, kRpn };

std::vector<AABox> LiveBoxes(const ImageRecord& record) {
  std::vector<AABox> boxes;
  for (const TextInstance& t : record.instances) {
    if (!t.ignore) boxes.push_back(t.polygon.bounds());
  }
  return boxes;
}

std::vector<AABox> JitteredBoxes(const ImageRecord& record, const JitterConfig& jitter) {
  JitterConfig j = jitter;
  j.seed = derive_seed(jitter.seed, hash_string(record.id));
  std::vector<AABox> out;
  for (const Proposal& p : jitter_proposals(LiveBoxes(record), record.size, j)) {
    if (p.box.width() > 0.0 && p.box.height() > 0.0) out.push_back(p.box);
  }
  return out;
}

SynthConfig Seeded(SynthConfig synth, std::uint64_t root, Stream stream) {
  synth.seed = derive_seed(root, stream);
  return synth;
}

TrainConfig SeededTrain(TrainConfig train, std::uint64_t root, LearningMode mode, int jobs) {
  train.seed = derive_seed(root, kShuffle);
  train.mode = mode;
  train.jobs = jobs;
  return train;
}

std::size_t KindIndex(DecoderKind kind) {
  for (std::size_t i = 0; i < std::size(kAllDecoderKinds); ++i) {
    if (kAllDecoderKinds[i] == kind) return i;
  }
  return 0;
}

}  // namespace

std::vector<RoISample> make_roi_samples(std::span<const ImageRecord> dataset,
                                        const JitterConfig& jitter, LearningMode mode,
                                        SampleDims dims, int jobs) {
  std::vector<std::vector<RoISample>> per_image(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    per_image[i] = build_samples(dataset[i], JitteredBoxes(dataset[i], jitter), mode, dims);
  });
  std::vector<RoISample> out;
  for (auto& v : per_image) {
    for (auto& s : v) out.push_back(std::move(s));
  }
  return out;
}

double multi_instance_fraction(std::span<const ImageRecord> dataset, const JitterConfig& jitter,
                               double min_cover, int jobs) {
  std::vector<std::pair<std::size_t, std::size_t>> counts(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    const ImageRecord& r = dataset[i];
    std::vector<BitMask> masks;
    for (const TextInstance& t : r.instances) masks.push_back(rasterize(t.polygon, r.size));
    const std::vector<AABox> boxes = JitteredBoxes(r, jitter);
    std::size_t multi = 0;
    for (const AABox& b : boxes) {
      // Pixels whose centers fall inside the box.
      const int x0 = std::max(0, static_cast<int>(std::ceil(b.x_min() - 0.5)));
      const int y0 = std::max(0, static_cast<int>(std::ceil(b.y_min() - 0.5)));
      const int x1 = std::min(r.size.width, static_cast<int>(std::ceil(b.x_max() - 0.5)));
      const int y1 = std::min(r.size.height, static_cast<int>(std::ceil(b.y_max() - 0.5)));
      int inside = 0;
      for (const BitMask& m : masks) {
        std::size_t covered = 0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) covered += m.get(x, y) ? 1 : 0;
        }
        if (static_cast<double>(covered) >= min_cover * b.area()) ++inside;
      }
      if (inside >= 2) ++multi;
    }
    counts[i] = {multi, boxes.size()};
  });
  std::size_t multi = 0, total = 0;
  for (const auto& [m, t] : counts) {
    multi += m;
    total += t;
  }
  return total == 0 ? 0.0 : static_cast<double>(multi) / static_cast<double>(total);
}

double grid_iou(std::span<const double> logits, const MaskTarget& target, double threshold) {
  if (logits.size() != target.cells().size()) {
    throw std::invalid_argument("grid_iou: logit count differs from target cell count");
  }
  // sigmoid(z) >= t  <=>  z >= logit(t).
  const double cut = std::log(threshold / (1.0 - threshold));
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const bool p = logits[i] >= cut;
    const bool t = target.cells()[i] != 0;
    inter += (p && t) ? 1 : 0;
    uni += (p || t) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double mean_grid_iou(const MaskHeadModel& model, std::span<const RoISample> samples, int jobs) {
  if (samples.empty()) throw std::invalid_argument("mean_grid_iou: no samples");
  constexpr std::size_t kChunk = 64;
  double sum = 0.0;
  for (std::size_t begin = 0; begin < samples.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, samples.size() - begin);
    std::vector<Tensor> features;
    features.reserve(n);
    for (std::size_t i = 0; i < n; ++i) features.push_back(samples[begin + i].features);
    const auto logits = forward_batch(model, features, jobs);
    for (std::size_t i = 0; i < n; ++i) sum += grid_iou(logits[i], samples[begin + i].target);
  }
  return sum / static_cast<double>(samples.size());
}

std::vector<ImageRecord> augment_rotations(std::span<const ImageRecord> dataset, Range angles,
                                           std::uint64_t seed, int jobs) {
  std::vector<ImageRecord> out(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, hash_string(dataset[i].id)));
    out[i] = rotate_record(dataset[i], rng.uniform(angles.lo, angles.hi));
  });
  return out;
}

DecoderStudyResult run_decoder_study(const DecoderStudyConfig& cfg) {
  cfg.train.Validate();
  DecoderStudyResult result;
  const SampleDims dims{cfg.shape.input_side, cfg.shape.output_side};
  double multi = 0.0;
  for (std::uint64_t seed : cfg.seeds) {
    const auto train_set =
        gen_dense_dataset(Seeded(cfg.synth, seed, kTrainData), cfg.train_scenes, "train", cfg.jobs);
    const auto test_set =
        gen_dense_dataset(Seeded(cfg.synth, seed, kTestData), cfg.test_scenes, "test", cfg.jobs);
    JitterConfig jitter = cfg.jitter;
    jitter.seed = derive_seed(seed, kJitter);
    const auto train_samples =
        make_roi_samples(train_set, jitter, LearningMode::kPixelAligned, dims, cfg.jobs);
    const auto test_samples =
        make_roi_samples(test_set, jitter, LearningMode::kPixelAligned, dims, cfg.jobs);
    multi += multi_instance_fraction(test_set, jitter, kMultiInstanceCover, cfg.jobs);

    DecoderStudyRun run;
    run.seed = seed;
    for (DecoderKind kind : kAllDecoderKinds) {
      MaskHeadModel model = build_model(kind, cfg.shape, derive_seed(seed, kInit));
      const TrainHistory h = train(
          model, train_samples, SeededTrain(cfg.train, seed, LearningMode::kPixelAligned, cfg.jobs));
      run.final_loss[KindIndex(kind)] = h.loss.back();
      run.mean_iou[KindIndex(kind)] = mean_grid_iou(model, test_samples, cfg.jobs);
    }
    result.runs.push_back(run);
  }
  if (!cfg.seeds.empty()) result.multi_instance_fraction = multi / static_cast<double>(cfg.seeds.size());
  return result;
}

RotationStudyResult run_rotation_study(const RotationStudyConfig& cfg) {
  cfg.train.Validate();
  const SampleDims dims{cfg.shape.input_side, cfg.shape.output_side};
  const auto base =
      gen_dense_dataset(Seeded(cfg.synth, cfg.seed, kTrainData), cfg.train_scenes, "train", cfg.jobs);
  const auto train_set =
      augment_rotations(base, cfg.augment_angles, derive_seed(cfg.seed, kAugment), cfg.jobs);
  const auto test_set =
      gen_dense_dataset(Seeded(cfg.synth, cfg.seed, kTestData), cfg.test_scenes, "test", cfg.jobs);
  JitterConfig jitter = cfg.jitter;
  jitter.seed = derive_seed(cfg.seed, kJitter);

  SweepConfig sweep;
  sweep.angles = cfg.angles;
  sweep.box_source = BoxSource::kGroundTruth;
  sweep.predict = cfg.predict;
  sweep.jobs = cfg.jobs;

  RotationStudyResult result;
  for (LearningMode mode : {LearningMode::kInstanceAware, LearningMode::kPixelAligned}) {
    const auto samples = make_roi_samples(train_set, jitter, mode, dims, cfg.jobs);
    MaskHeadModel model = build_model(DecoderKind::kFcFc, cfg.shape, derive_seed(cfg.seed, kInit));
    train(model, samples, SeededTrain(cfg.train, cfg.seed, mode, cfg.jobs));
    SweepReport report = rotation_sweep(model, test_set, sweep);
    (mode == LearningMode::kInstanceAware ? result.instance_aware : result.pixel_aligned) =
        std::move(report);
  }
  return result;
}

PredictionSnapshot synthesize_rpn(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                  const SynthRpnConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  PredictionSnapshot pred;
  pred.objectness.reserve(anchors.size());
  pred.deltas.reserve(anchors.size());
  for (const Anchor& a : anchors) {
    double best = 0.0;
    std::optional<std::size_t> best_gt;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = box_iou(a.box, gts[g]);
      if (iou > best) {
        best = iou;
        best_gt = g;
      }
    }
    const double z = cfg.sharpness * (best - 0.5) + cfg.objectness_noise * rng.normal();
    pred.objectness.push_back(1.0 / (1.0 + std::exp(-z)));
    BoxDelta d{};
    if (best_gt) d = encode_delta(a.box, gts[*best_gt]);
    for (double& v : d) v += cfg.delta_noise * (1.0 - best) * rng.normal();
    pred.deltas.push_back(d);
  }
  return pred;
}

std::vector<AABox> adaptive_proposals(std::span<const Anchor> anchors, std::span<const AABox> gts,
                                      const PredictionSnapshot& pred, int k,
                                      MatchingLossMode mode, Size canvas, double nms_threshold) {
  const AssignmentResult a = adaptive_assign(anchors, gts, pred, k, mode);
  std::vector<std::pair<double, AABox>> scored;
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    if (a.labels[j] != AnchorLabel::kPositive) continue;
    const AABox b = decode_delta(anchors[j].box, pred.deltas[j]);
    const double x0 = std::clamp(b.x_min(), 0.0, static_cast<double>(canvas.width));
    const double y0 = std::clamp(b.y_min(), 0.0, static_cast<double>(canvas.height));
    const double x1 = std::clamp(b.x_max(), 0.0, static_cast<double>(canvas.width));
    const double y1 = std::clamp(b.y_max(), 0.0, static_cast<double>(canvas.height));
    if (x1 > x0 && y1 > y0) scored.emplace_back(pred.objectness[j], AABox(x0, y0, x1, y1));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  std::vector<AABox> kept;
  for (const auto& [score, box] : scored) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const AABox& other) {
      return box_iou(box, other) > nms_threshold;
    });
    if (!suppressed) kept.push_back(box);
  }
  return kept;
}

std::vector<KSweepEntry> run_k_sweep(const KSweepConfig& cfg) {
  cfg.train.Validate();
  const SampleDims dims{cfg.shape.input_side, cfg.shape.output_side};
  const auto train_set =
      gen_dense_dataset(Seeded(cfg.synth, cfg.seed, kTrainData), cfg.train_scenes, "train", cfg.jobs);
  const auto test_set =
      gen_dense_dataset(Seeded(cfg.synth, cfg.seed, kTestData), cfg.test_scenes, "test", cfg.jobs);
  JitterConfig jitter = cfg.jitter;
  jitter.seed = derive_seed(cfg.seed, kJitter);
  const auto samples = make_roi_samples(train_set, jitter, LearningMode::kPixelAligned, dims, cfg.jobs);
  MaskHeadModel model = build_model(DecoderKind::kFcFc, cfg.shape, derive_seed(cfg.seed, kInit));
  train(model, samples, SeededTrain(cfg.train, cfg.seed, LearningMode::kPixelAligned, cfg.jobs));

  // One synthesized RPN output per test image, shared by every k.
  std::vector<std::vector<Anchor>> anchors(test_set.size());
  std::vector<PredictionSnapshot> preds(test_set.size());
  parallel_for(test_set.size(), cfg.jobs, [&](std::size_t i) {
    AnchorGridConfig grid = cfg.anchors;
    grid.image = test_set[i].size;
    anchors[i] = generate_anchors(grid);
    preds[i] = synthesize_rpn(anchors[i], LiveBoxes(test_set[i]), cfg.rpn,
                              derive_seed(derive_seed(cfg.seed, kRpn), hash_string(test_set[i].id)));
  });

  std::vector<KSweepEntry> out;
  for (int k : cfg.ks) {
    std::vector<ImageDetections> dets(test_set.size());
    std::vector<std::size_t> proposal_counts(test_set.size());
    for (std::size_t i = 0; i < test_set.size(); ++i) {
      const auto boxes = adaptive_proposals(anchors[i], LiveBoxes(test_set[i]), preds[i], k,
                                            cfg.loss_mode, test_set[i].size, cfg.proposal_nms);
      proposal_counts[i] = boxes.size();
      dets[i] = {test_set[i].id, predict_polygons(model, test_set[i], boxes, cfg.predict)};
    }
    KSweepEntry e;
    e.k = k;
    std::size_t total = 0;
    for (std::size_t c : proposal_counts) total += c;
    e.proposals_per_image =
        test_set.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(test_set.size());
    e.report = evaluate(dets, test_set, kDefaultMatchIou, cfg.jobs);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace mayor
