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

#include "mayor/eval.h"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "mayor/parallel.h"
#include "mayor/random.h"

namespace mayor {
namespace {

bool BoxesOverlap(const AABox& a, const AABox& b) {
  return a.x_min() < b.x_max() && b.x_min() < a.x_max() && a.y_min() < b.y_max() &&
         b.y_min() < a.y_max();
}

ImageEval Count(const MatchResult& m, std::string id) {
  return {std::move(id), m.matches.size(), m.false_positives.size(), m.missed.size()};
}

nlohmann::ordered_json ReportToJson(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["recall"] = r.recall;
  j["precision"] = r.precision;
  j["f_measure"] = r.f_measure;
  j["true_positives"] = r.true_positives;
  j["false_positives"] = r.false_positives;
  j["false_negatives"] = r.false_negatives;
  auto& images = j["per_image"] = nlohmann::ordered_json::array();
  for (const ImageEval& e : r.per_image) {
    images.push_back({{"id", e.id},
                      {"true_positives", e.true_positives},
                      {"false_positives", e.false_positives},
                      {"false_negatives", e.false_negatives}});
  }
  return j;
}

}  // namespace

MatchResult match_detections(std::span<const Detection> detections,
                             std::span<const TextInstance> instances, double iou_threshold,
                             double resolution) {
  std::vector<AABox> gt_boxes;
  gt_boxes.reserve(instances.size());
  for (const TextInstance& t : instances) gt_boxes.push_back(t.polygon.bounds());

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });

  MatchResult result;
  std::vector<bool> taken(instances.size(), false);
  for (std::size_t d : order) {
    const AABox box = detections[d].polygon.bounds();
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    bool hits_ignore = false;
    for (std::size_t g = 0; g < instances.size(); ++g) {
      if (!BoxesOverlap(box, gt_boxes[g])) continue;
      if (!instances[g].ignore && taken[g]) continue;
      const double iou = polygon_iou(detections[d].polygon, instances[g].polygon, resolution);
      if (iou < iou_threshold) continue;
      if (instances[g].ignore) {
        hits_ignore = true;
      } else if (iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best) {
      taken[*best] = true;
      result.matches.emplace_back(d, *best);
    } else if (hits_ignore) {
      result.discarded.push_back(d);
    } else {
      result.false_positives.push_back(d);
    }
  }
  for (std::size_t g = 0; g < instances.size(); ++g) {
    if (!instances[g].ignore && !taken[g]) result.missed.push_back(g);
  }
  return result;
}

double f_measure(double recall, double precision) {
  if (!(recall >= 0.0 && recall <= 1.0) || !(precision >= 0.0 && precision <= 1.0)) {
    throw std::invalid_argument("f_measure: recall and precision must lie in [0, 1]");
  }
  if (recall + precision == 0.0) return 0.0;
  return 2.0 * recall * precision / (recall + precision);
}

EvalReport evaluate(std::span<const ImageDetections> detections,
                    std::span<const ImageRecord> ground_truth, double iou_threshold, int jobs) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) index.emplace(ground_truth[i].id, i);
  std::vector<const ImageDetections*> by_image(ground_truth.size(), nullptr);
  for (const ImageDetections& d : detections) {
    const auto it = index.find(d.image_id);
    if (it == index.end()) {
      throw std::invalid_argument(fmt::format("evaluate: unknown image id '{}'", d.image_id));
    }
    if (by_image[it->second] != nullptr) {
      throw std::invalid_argument(fmt::format("evaluate: duplicate detections for '{}'", d.image_id));
    }
    by_image[it->second] = &d;
  }

  std::vector<ImageEval> per_image(ground_truth.size());
  parallel_for(ground_truth.size(), jobs, [&](std::size_t i) {
    const std::span<const Detection> dets =
        by_image[i] != nullptr ? std::span<const Detection>(by_image[i]->detections)
                               : std::span<const Detection>();
    per_image[i] = Count(match_detections(dets, ground_truth[i].instances, iou_threshold),
                         ground_truth[i].id);
  });
  std::sort(per_image.begin(), per_image.end(),
            [](const ImageEval& a, const ImageEval& b) { return a.id < b.id; });

  EvalReport r;
  for (const ImageEval& e : per_image) {
    r.true_positives += e.true_positives;
    r.false_positives += e.false_positives;
    r.false_negatives += e.false_negatives;
  }
  const std::size_t gts = r.true_positives + r.false_negatives;
  const std::size_t dets = r.true_positives + r.false_positives;
  r.recall = gts > 0 ? static_cast<double>(r.true_positives) / static_cast<double>(gts) : 0.0;
  r.precision = dets > 0 ? static_cast<double>(r.true_positives) / static_cast<double>(dets) : 0.0;
  r.f_measure = f_measure(r.recall, r.precision);
  r.per_image = std::move(per_image);
  return r;
}

std::vector<AABox> sweep_proposals(const ImageRecord& record, BoxSource source,
                                   const JitterConfig& jitter) {
  std::vector<AABox> boxes;
  for (const TextInstance& t : record.instances) {
    if (!t.ignore) boxes.push_back(t.polygon.bounds());
  }
  if (source == BoxSource::kGroundTruth) return boxes;
  JitterConfig cfg = jitter;
  cfg.seed = derive_seed(jitter.seed, hash_string(record.id));
  std::vector<AABox> out;
  for (const Proposal& p : jitter_proposals(boxes, record.size, cfg)) out.push_back(p.box);
  return out;
}

SweepReport rotation_sweep(const MaskHeadModel& model, std::span<const ImageRecord> dataset,
                           const SweepConfig& cfg) {
  for (const ImageRecord& r : dataset) {
    if (!r.pixels) {
      throw std::invalid_argument(fmt::format("rotation_sweep: image '{}' has no pixels", r.id));
    }
  }
  SweepReport report;
  for (double angle : cfg.angles) {
    const std::vector<ImageRecord> rotated = rotate_dataset(dataset, angle, cfg.jobs);
    std::vector<ImageDetections> dets(rotated.size());
    for (std::size_t i = 0; i < rotated.size(); ++i) {
      const std::vector<AABox> proposals =
          sweep_proposals(rotated[i], cfg.box_source, cfg.jitter);
      dets[i] = {rotated[i].id, predict_polygons(model, rotated[i], proposals, cfg.predict)};
    }
    report.push_back({angle, evaluate(dets, rotated, cfg.iou_threshold, cfg.jobs)});
  }
  return report;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = "angle,recall,precision,f_measure,tp,fp,fn\n";
  for (const SweepEntry& e : report) {
    out += fmt::format("{:g},{:.6f},{:.6f},{:.6f},{},{},{}\n", e.angle, e.report.recall,
                       e.report.precision, e.report.f_measure, e.report.true_positives,
                       e.report.false_positives, e.report.false_negatives);
  }
  return out;
}

std::string report_json(const EvalReport& report) { return ReportToJson(report).dump(2) + "\n"; }

std::string sweep_json(const SweepReport& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const SweepEntry& e : report) {
    nlohmann::ordered_json item;
    item["angle"] = e.angle;
    item["report"] = ReportToJson(e.report);
    j.push_back(std::move(item));
  }
  return j.dump(2) + "\n";
}

std::string sweep_svg(std::span<const std::pair<std::string, SweepReport>> series) {
  constexpr double kW = 480, kH = 320, kLeft = 50, kRight = 150, kTop = 20, kBottom = 40;
  constexpr const char* kColors[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93"};
  double max_angle = 0.0;
  for (const auto& s : series) {
    for (const SweepEntry& e : s.second) max_angle = std::max(max_angle, e.angle);
  }
  if (max_angle <= 0.0) max_angle = 90.0;
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  auto px = [&](double angle) { return kLeft + plot_w * angle / max_angle; };
  auto py = [&](double f) { return kTop + plot_h * (1.0 - f); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:g}\" height=\"{1:g}\" "
      "viewBox=\"0 0 {0:g} {1:g}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kW, kH);
  svg += fmt::format(
      "<path d=\"M{0:.2f} {1:.2f}V{2:.2f}H{3:.2f}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
      kTop, kTop + plot_h, kLeft + plot_w);
  for (int t = 0; t <= 4; ++t) {
    const double f = t / 4.0;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.2f}</text>\n",
                       kLeft - 6, py(f) + 4, f);
  }
  for (const auto& s : series) {
    for (const SweepEntry& e : s.second) {
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n",
                         px(e.angle), kTop + plot_h + 16, e.angle);
    }
    break;
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">rotation (degrees)</text>\n",
      kLeft + plot_w / 2, kH - 6);
  svg += fmt::format(
      "<text x=\"14\" y=\"{:.2f}\" transform=\"rotate(-90 14 {:.2f})\" "
      "text-anchor=\"middle\">F-measure</text>\n",
      kTop + plot_h / 2, kTop + plot_h / 2);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    std::string points;
    for (const SweepEntry& e : series[i].second) {
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", px(e.angle), py(e.report.f_measure));
    }
    svg += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", points,
        color);
    const double ly = kTop + 14.0 * static_cast<double>(i + 1);
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/>\n<text x=\"{4:.2f}\" y=\"{5:.2f}\">{6}</text>\n",
        kLeft + plot_w + 10, ly, kLeft + plot_w + 28, color, kLeft + plot_w + 32, ly + 4,
        series[i].first);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace mayor
