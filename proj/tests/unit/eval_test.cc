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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "doctest.h"
#include "json.hpp"
#include "mayor/data.h"
#include "mayor/eval.h"
#include "mayor/random.h"
#include "oracles.h"

namespace mayor {
namespace {

struct Triple {
  double r, p, f;
};

// Every recall / precision / F row of the two result tables, in percent.
constexpr Triple kTableRows[] = {
    {40.9, 67.3, 50.9}, {43.8, 67.2, 53.0}, {55.7, 70.0, 62.0}, {64.7, 66.0, 65.3},
    {60.8, 73.8, 66.6}, {75.0, 74.5, 74.7}, {79.2, 79.6, 79.4}, {82.9, 89.0, 85.8},
    {79.0, 86.3, 82.5}, {79.8, 86.7, 83.1}, {85.5, 87.8, 86.6}, {83.4, 87.3, 85.3},
    {90.8, 96.4, 93.5}, {57.2, 64.8, 60.7}, {98.2, 99.0, 98.6}, {82.9, 88.2, 85.5},
    {99.2, 99.4, 99.3}, {96.5, 96.9, 96.7},
};

TextInstance Inst(const AABox& b, bool ignore = false) { return {box_polygon(b), ignore}; }

TEST_CASE("f_measure") {
  CHECK(f_measure(0.0, 0.0) == 0.0);
  for (double x : {0.1, 0.5, 0.866, 1.0}) CHECK(f_measure(x, x) == doctest::Approx(x).epsilon(1e-15));
  CHECK(std::abs(f_measure(0.855, 0.878) - 0.8663) <= 5e-4);
  CHECK(std::abs(f_measure(0.908, 0.964) - 0.9351) <= 5e-4);
  CHECK_THROWS_AS(f_measure(1.2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(f_measure(0.5, -0.1), std::invalid_argument);

  // Printed values are rounded to 0.1; the printed F must be reachable from
  // some recall and precision that round to the printed pair.
  for (const Triple& t : kTableRows) {
    CAPTURE(t.f);
    const double lo = f_measure((t.r - 0.05) / 100, (t.p - 0.05) / 100);
    const double hi = f_measure((t.r + 0.05) / 100, (t.p + 0.05) / 100);
    CHECK(lo <= (t.f + 0.05) / 100);
    CHECK(hi >= (t.f - 0.05) / 100);
  }

  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double r = rng.uniform(), p = rng.uniform();
    const double f = f_measure(r, p);
    CHECK(f == f_measure(p, r));
    CHECK(f <= (r + p) / 2 + 1e-15);
    CHECK(f <= 2 * std::min(r, p) + 1e-15);
    CHECK(f >= std::min(r, p) - 1e-15);
  }
}

TEST_CASE("match_detections examples") {
  const std::vector<TextInstance> gts{Inst(AABox(0, 0, 40, 10)), Inst(AABox(0, 12, 40, 22))};
  SUBCASE("perfect detections") {
    std::vector<Detection> dets;
    for (const auto& g : gts) dets.emplace_back(g.polygon, 0.9);
    const MatchResult m = match_detections(dets, gts);
    CHECK(m.matches.size() == 2);
    CHECK(m.missed.empty());
  }
  SUBCASE("one detection overlapping two instances") {
    const std::vector<Detection> dets{{box_polygon(AABox(0, 8, 40, 22)), 0.5}};
    const MatchResult m = match_detections(dets, gts);
    REQUIRE(m.matches.size() == 1);
    CHECK(m.matches[0].second == 1);
    CHECK(m.missed == std::vector<std::size_t>{0});
  }
  SUBCASE("higher score wins the instance") {
    const std::vector<Detection> dets{{box_polygon(AABox(0, 0, 40, 9)), 0.3},
                                      {box_polygon(AABox(0, 1, 40, 10)), 0.8}};
    const MatchResult m = match_detections(dets, gts);
    REQUIRE(m.matches.size() == 1);
    CHECK(m.matches[0] == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(m.false_positives == std::vector<std::size_t>{0});
  }
  SUBCASE("ignore regions") {
    const std::vector<TextInstance> with_ignore{Inst(AABox(0, 0, 40, 10)),
                                                Inst(AABox(0, 30, 40, 40), true)};
    const std::vector<Detection> dets{{box_polygon(AABox(0, 30, 40, 40)), 0.9},
                                      {box_polygon(AABox(50, 50, 60, 60)), 0.9}};
    const MatchResult m = match_detections(dets, with_ignore);
    CHECK(m.discarded == std::vector<std::size_t>{0});
    CHECK(m.false_positives == std::vector<std::size_t>{1});
    CHECK(m.missed == std::vector<std::size_t>{0});
  }
}

// Greedy replay without the box prefilter.
MatchResult GreedyOracle(const std::vector<Detection>& dets, const std::vector<TextInstance>& gts) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  MatchResult out;
  std::vector<bool> used(gts.size(), false);
  for (std::size_t d : order) {
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    bool ignore_hit = false;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = polygon_iou(dets[d].polygon, gts[g].polygon);
      if (iou < 0.5) continue;
      if (gts[g].ignore) {
        ignore_hit = true;
      } else if (!used[g] && (!best || iou > best_iou)) {
        best = g;
        best_iou = iou;
      }
    }
    if (best) {
      used[*best] = true;
      out.matches.emplace_back(d, *best);
    } else if (ignore_hit) {
      out.discarded.push_back(d);
    } else {
      out.false_positives.push_back(d);
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gts[g].ignore && !used[g]) out.missed.push_back(g);
  }
  return out;
}

TEST_CASE("match_detections against a greedy replay") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TextInstance> gts;
    for (int g = 0; g < 5; ++g) {
      const double x = rng.uniform(0, 60), y = rng.uniform(0, 60);
      gts.push_back(Inst(AABox(x, y, x + rng.uniform(8, 30), y + rng.uniform(4, 12)), g == 4));
    }
    std::vector<Detection> dets;
    for (int d = 0; d < 20; ++d) {
      const AABox& g = gts[static_cast<std::size_t>(rng.uniform_int(0, 4))].polygon.bounds();
      const double dx = rng.uniform(-4, 4), dy = rng.uniform(-3, 3);
      const Polygon poly = oracle::RotatedRect((g.x_min() + g.x_max()) / 2 + dx,
                                               (g.y_min() + g.y_max()) / 2 + dy,
                                               g.width() * rng.uniform(0.7, 1.3),
                                               g.height() * rng.uniform(0.7, 1.3), rng.uniform(-10, 10));
      dets.emplace_back(poly, std::round(rng.uniform() * 10) / 10);
    }
    const MatchResult got = match_detections(dets, gts);
    const MatchResult want = GreedyOracle(dets, gts);
    CHECK(got.matches == want.matches);
    CHECK(got.false_positives == want.false_positives);
    CHECK(got.discarded == want.discarded);
    CHECK(got.missed == want.missed);
    // One-to-one.
    std::vector<std::size_t> used;
    for (const auto& pr : got.matches) used.push_back(pr.second);
    std::sort(used.begin(), used.end());
    CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
    CHECK(got.matches.size() + got.false_positives.size() + got.discarded.size() == dets.size());
  }
}

ImageRecord Record(std::string id, std::vector<TextInstance> inst) {
  return {std::move(id), Size{100, 100}, std::move(inst), std::nullopt};
}

TEST_CASE("evaluate") {
  // 10 instances over two images; 8 found, 2 false alarms.
  std::vector<ImageRecord> gts;
  std::vector<ImageDetections> dets;
  for (int img = 0; img < 2; ++img) {
    std::vector<TextInstance> inst;
    ImageDetections d{"img" + std::to_string(img), {}};
    for (int k = 0; k < 5; ++k) {
      const AABox b(5, 5 + 15 * k, 80, 15 + 15 * k);
      inst.push_back(Inst(b));
      if (k < 4) d.detections.emplace_back(box_polygon(b), 0.9);
    }
    d.detections.emplace_back(box_polygon(AABox(85, 0, 99, 99)), 0.4);
    gts.push_back(Record(d.image_id, inst));
    dets.push_back(d);
  }
  const EvalReport r = evaluate(dets, gts);
  CHECK(r.true_positives == 8);
  CHECK(r.false_positives == 2);
  CHECK(r.false_negatives == 2);
  CHECK(r.recall == doctest::Approx(0.8));
  CHECK(r.precision == doctest::Approx(0.8));
  CHECK(r.f_measure == doctest::Approx(0.8));
  REQUIRE(r.per_image.size() == 2);
  CHECK(r.per_image[0].id == "img0");

  SUBCASE("permutation invariance and jobs") {
    std::vector<ImageDetections> d2(dets.rbegin(), dets.rend());
    for (auto& d : d2) std::reverse(d.detections.begin(), d.detections.end());
    std::vector<ImageRecord> g2(gts.rbegin(), gts.rend());
    const EvalReport p = evaluate(d2, g2, 0.5, 3);
    CHECK(report_json(p) == report_json(r));
  }
  SUBCASE("perfect and empty") {
    std::vector<ImageDetections> perfect;
    for (const auto& g : gts) {
      ImageDetections d{g.id, {}};
      for (const auto& t : g.instances) d.detections.emplace_back(t.polygon, 1.0);
      perfect.push_back(d);
    }
    const EvalReport p = evaluate(perfect, gts);
    CHECK(p.f_measure == 1.0);
    CHECK(p.recall == 1.0);
    const EvalReport e = evaluate({}, gts);
    CHECK(e.recall == 0.0);
    CHECK(e.precision == 0.0);
    CHECK(e.f_measure == 0.0);
    CHECK(e.false_negatives == 10);
  }
  SUBCASE("removing a false positive never lowers precision") {
    auto fewer = dets;
    fewer[0].detections.pop_back();
    CHECK(evaluate(fewer, gts).precision >= r.precision);
    auto more = dets;
    more[1].detections.emplace_back(box_polygon(AABox(0, 90, 10, 99)), 0.1);
    const EvalReport m = evaluate(more, gts);
    CHECK(m.true_positives >= r.true_positives);
    CHECK(m.recall >= r.recall);
  }
  SUBCASE("ignore instances change neither TP nor FN") {
    auto with_ignore = gts;
    with_ignore[0].instances.push_back(Inst(AABox(85, 0, 99, 99), true));
    const EvalReport w = evaluate(dets, with_ignore);
    CHECK(w.true_positives == r.true_positives);
    CHECK(w.false_negatives == r.false_negatives);
    CHECK(w.false_positives == r.false_positives - 1);
  }
  SUBCASE("errors") {
    std::vector<ImageDetections> bad{{"nope", {}}};
    CHECK_THROWS_WITH_AS(evaluate(bad, gts), doctest::Contains("nope"), std::invalid_argument);
    std::vector<ImageDetections> dup{dets[0], dets[0]};
    CHECK_THROWS_AS(evaluate(dup, gts), std::invalid_argument);
  }
}

TEST_CASE("report serialization") {
  EvalReport r;
  r.recall = 0.5;
  r.precision = 1.0;
  r.f_measure = f_measure(0.5, 1.0);
  r.true_positives = 1;
  r.false_negatives = 1;
  r.per_image.push_back({"a", 1, 0, 1});
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["recall"] == 0.5);
  CHECK(j["true_positives"] == 1);
  CHECK(j["per_image"][0]["id"] == "a");

  const SweepReport s{{0.0, r}, {45.0, r}};
  const std::string csv = sweep_csv(s);
  CHECK(csv.starts_with("angle,recall,precision,f_measure,tp,fp,fn\n0,"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(nlohmann::json::parse(sweep_json(s)).size() == 2);
  const std::vector<std::pair<std::string, SweepReport>> series{{"a", s}, {"b", s}};
  const std::string svg = sweep_svg(series);
  CHECK(svg.starts_with("<svg"));
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("rotation_sweep") {
  SynthConfig cfg;
  cfg.orientation = {0.0, 0.0};
  std::vector<ImageRecord> data;
  for (int i = 0; i < 3; ++i) {
    cfg.seed = 40 + static_cast<std::uint64_t>(i);
    data.push_back(gen_dense_scene(cfg, "s" + std::to_string(i)));
  }
  // A saturated foreground model pastes the whole box: exact on rectangles.
  MaskHeadModel fg(DecoderKind::kDeconvConv, HeadShape{14, 3, 2, 28, 4});
  fg.block("pred.bias")[0] = 30.0;
  SweepConfig sc;
  const SweepReport rep = rotation_sweep(fg, data, sc);
  REQUIRE(rep.size() == 7);
  CHECK(rep[0].angle == 0.0);
  CHECK(rep[0].report.f_measure == 1.0);
  CHECK(rep[6].report.f_measure == 1.0);
  // Whole-box masks of diagonal stripes overlap their neighbours.
  CHECK(rep[3].report.f_measure < rep[0].report.f_measure);

  sc.jobs = 3;
  CHECK(sweep_csv(rotation_sweep(fg, data, sc)) == sweep_csv(rep));

  const auto gt = sweep_proposals(data[0], BoxSource::kGroundTruth, {});
  CHECK(gt == instance_boxes(data[0].instances));
  const JitterConfig jit{0.1, 0.1, 2, 5};
  const auto a = sweep_proposals(data[0], BoxSource::kPredicted, jit);
  CHECK(a.size() == 2 * gt.size());
  CHECK(a == sweep_proposals(data[0], BoxSource::kPredicted, jit));
  CHECK(a != sweep_proposals(data[1], BoxSource::kPredicted, jit));
}

}  // namespace
}  // namespace mayor
