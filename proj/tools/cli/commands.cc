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

#include "commands.h"

#include <fmt/format.h>

#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "mayor/parallel.h"
#include "mayor/random.h"

namespace mayor::cli {
namespace {

constexpr std::string_view kToolVersion = "mayor_lab " MAYOR_VERSION;

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
}

void MakeDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("{}: {}", dir.string(), ec.message()));
}

// `root/<name>` when it exists, else `root` itself.
fs::path SplitDir(const fs::path& root, std::string_view name) {
  const fs::path sub = root / name;
  return fs::is_directory(sub) ? sub : root;
}

std::vector<ImageRecord> LoadSplit(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error(fmt::format("{}: not a directory", dir.string()));
  }
  std::vector<ImageRecord> records = load_annotations(dir);
  if (records.empty()) throw std::runtime_error(fmt::format("{}: no annotations", dir.string()));
  return records;
}

std::vector<AABox> LiveBoxes(const ImageRecord& r) {
  std::vector<AABox> out;
  for (const TextInstance& t : r.instances) {
    if (!t.ignore) out.push_back(t.polygon.bounds());
  }
  return out;
}

void Log(const RunContext& ctx, const std::string& line) {
  if (ctx.log != nullptr) *ctx.log << line << "\n";
}

SweepConfig MakeSweep(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  SweepConfig s;
  s.angles = c.angles;
  s.box_source = c.box_source;
  s.jitter = c.eval_jitter;
  s.jitter.seed = stream_seed(c, Stream::kEvalJitter);
  s.predict = c.predict;
  s.predict.jobs = ctx.jobs;
  s.iou_threshold = c.match_iou;
  s.jobs = ctx.jobs;
  return s;
}

std::string ReportCsv(const EvalReport& r) {
  return fmt::format("recall,precision,f_measure,tp,fp,fn\n{:.6f},{:.6f},{:.6f},{},{},{}\n",
                     r.recall, r.precision, r.f_measure, r.true_positives, r.false_positives,
                     r.false_negatives);
}

struct AssignStats {
  std::size_t gts = 0;
  std::size_t positives = 0;
  std::size_t zero_positive = 0;
  double iou_sum = 0.0;

  void Add(const AssignStats& o) {
    gts += o.gts;
    positives += o.positives;
    zero_positive += o.zero_positive;
    iou_sum += o.iou_sum;
  }
};

AssignStats Summarize(const AssignmentResult& a, std::span<const Anchor> anchors,
                      std::span<const AABox> gts) {
  AssignStats s;
  s.gts = gts.size();
  for (std::size_t n : positives_per_gt(a, gts.size())) s.zero_positive += n == 0 ? 1 : 0;
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    if (a.labels[j] != AnchorLabel::kPositive) continue;
    ++s.positives;
    s.iou_sum += box_iou(anchors[j].box, gts[*a.matched_gt[j]]);
  }
  return s;
}

std::string_view LossLabel(MatchingLossMode m) {
  switch (m) {
    case MatchingLossMode::kLocalizationOnly:
      return "loc";
    case MatchingLossMode::kObjectnessOnly:
      return "obj";
    default:
      return "both";
  }
}

}  // namespace

void write_stamp(const RunContext& ctx, const std::string& command, const fs::path& out) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = ctx.config.seed;
  j["config_hash"] = config_hash(ctx.config);
  j["tool"] = kToolVersion;
  WriteText(out / "stamp.json", j.dump(2) + "\n");
}

void cmd_synth(const RunContext& ctx, const fs::path& out) {
  const ExperimentConfig& c = ctx.config;
  nlohmann::ordered_json manifest;
  manifest["seed"] = c.seed;
  manifest["config_hash"] = config_hash(c);
  const std::pair<const char*, Stream> splits[] = {{"train", Stream::kTrainScenes},
                                                   {"test", Stream::kTestScenes}};
  for (const auto& [name, stream] : splits) {
    SynthConfig s = c.synth;
    s.seed = stream_seed(c, stream);
    const int count = std::string_view(name) == "train" ? c.train_scenes : c.test_scenes;
    const auto records = gen_dense_dataset(s, count, fmt::format("{}_", name), ctx.jobs);
    MakeDir(out / name);
    save_annotations(records, out / name);
    auto& entry = manifest[name];
    entry["count"] = records.size();
    std::size_t instances = 0;
    auto ids = nlohmann::ordered_json::array();
    for (const ImageRecord& r : records) {
      ids.push_back(r.id);
      instances += r.instances.size();
    }
    entry["instances"] = instances;
    entry["ids"] = std::move(ids);
    Log(ctx, fmt::format("{}: {} scenes, {} instances", name, records.size(), instances));
  }
  WriteText(out / "manifest.json", manifest.dump(2) + "\n");
  WriteText(out / "config.ini", to_ini(c));
  write_stamp(ctx, "synth", out);
}

void cmd_rotate(const RunContext& ctx, const fs::path& data, double angle, const fs::path& out) {
  const auto records = LoadSplit(data);
  const auto rotated = rotate_dataset(records, angle, ctx.jobs);
  MakeDir(out);
  save_annotations(rotated, out);
  write_stamp(ctx, "rotate", out);
  Log(ctx, fmt::format("rotated {} images by {:g} degrees", rotated.size(), angle));
}

void cmd_assign_bench(const RunContext& ctx, const fs::path& data, const fs::path& out) {
  const ExperimentConfig& c = ctx.config;
  const auto records = LoadSplit(SplitDir(data, "test"));

  struct Row {
    std::string method;
    std::vector<double> ratios;
    int k = 0;
    std::optional<MatchingLossMode> loss;
    bool rescue = false;
  };
  std::vector<Row> rows;
  for (bool rescue : {true, false}) {
    for (const auto& set : c.ratio_sets) {
      rows.push_back({rescue ? "standard" : "standard-norescue", set, 0, std::nullopt, rescue});
    }
  }
  for (const auto& set : c.ratio_sets) rows.push_back({"adaptive", set, c.k, c.loss_mode});
  for (int k : c.ks) rows.push_back({"adaptive", c.anchors.aspect_ratios, k, c.loss_mode});
  for (MatchingLossMode m : {MatchingLossMode::kLocalizationOnly, MatchingLossMode::kObjectnessOnly,
                             MatchingLossMode::kBoth}) {
    rows.push_back({"adaptive", c.anchors.aspect_ratios, c.k, m});
  }

  // Anchors and synthesized predictions depend only on the image and the
  // ratio set.
  std::map<std::vector<double>, std::size_t> set_index;
  for (const Row& r : rows) set_index.emplace(r.ratios, set_index.size());
  std::vector<std::vector<double>> sets(set_index.size());
  for (const auto& [set, i] : set_index) sets[i] = set;

  std::vector<std::vector<AssignStats>> per_image(records.size(),
                                                  std::vector<AssignStats>(rows.size()));
  parallel_for(records.size(), ctx.jobs, [&](std::size_t i) {
    const ImageRecord& rec = records[i];
    const std::vector<AABox> gts = LiveBoxes(rec);
    std::vector<std::vector<Anchor>> anchors(sets.size());
    std::vector<PredictionSnapshot> preds(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
      AnchorGridConfig grid = c.anchors;
      grid.image = rec.size;
      grid.aspect_ratios = sets[s];
      anchors[s] = generate_anchors(grid);
      preds[s] = synthesize_rpn(anchors[s], gts, c.rpn,
                                derive_seed(stream_seed(c, Stream::kRpn),
                                            hash_string(fmt::format("{}#{}", rec.id, s))));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Row& row = rows[r];
      const std::size_t s = set_index.at(row.ratios);
      AssignmentResult a;
      if (row.loss) {
        a = adaptive_assign(anchors[s], gts, preds[s], row.k, *row.loss);
      } else {
        StandardAssignConfig sc = c.standard;
        sc.rescue_low_quality = row.rescue;
        a = standard_assign(anchors[s], gts, sc);
      }
      per_image[i][r] = Summarize(a, anchors[s], gts);
    }
  });

  std::string csv = "method,ratios,k,loss,gts,positives_per_gt,zero_positive_gts,mean_matched_iou\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    AssignStats total;
    for (const auto& img : per_image) total.Add(img[r]);
    const Row& row = rows[r];
    std::string ratios;
    for (double v : row.ratios) ratios += (ratios.empty() ? "" : "/") + fmt::format("{}", v);
    csv += fmt::format(
        "{},{},{},{},{},{:.4f},{},{:.4f}\n", row.method, ratios,
        row.loss ? fmt::format("{}", row.k) : std::string("-"),
        row.loss ? std::string(LossLabel(*row.loss)) : std::string("-"), total.gts,
        total.gts ? static_cast<double>(total.positives) / static_cast<double>(total.gts) : 0.0,
        total.zero_positive,
        total.positives ? total.iou_sum / static_cast<double>(total.positives) : 0.0);
  }
  MakeDir(out);
  WriteText(out / "assign_bench.csv", csv);
  write_stamp(ctx, "assign-bench", out);
  Log(ctx, fmt::format("{} configurations over {} images", rows.size(), records.size()));
}

void cmd_train(const RunContext& ctx, const fs::path& data, const fs::path& out) {
  const ExperimentConfig& c = ctx.config;
  const auto records = LoadSplit(SplitDir(data, "train"));
  JitterConfig jitter = c.train_jitter;
  jitter.seed = stream_seed(c, Stream::kTrainJitter);
  const auto samples = make_roi_samples(records, jitter, c.mode,
                                        SampleDims{c.head.input_side, c.head.output_side}, ctx.jobs);
  if (samples.empty()) throw std::runtime_error("train: no proposal matched an instance");
  MaskHeadModel model = build_model(c.decoder, c.head, stream_seed(c, Stream::kInit));
  TrainConfig tc = c.train;
  tc.seed = stream_seed(c, Stream::kShuffle);
  tc.mode = c.mode;
  tc.jobs = ctx.jobs;
  const TrainHistory history = train(model, samples, tc);
  MakeDir(out);
  save_checkpoint(model, out / "model.bin");
  write_history_csv(history, out / "history.csv");
  write_stamp(ctx, "train", out);
  Log(ctx, fmt::format("{} {} on {} samples: loss {:.4f} -> {:.4f}", to_string(c.decoder),
                       c.mode == LearningMode::kInstanceAware ? "instance-aware" : "pixel-aligned",
                       samples.size(), history.loss.front(), history.loss.back()));
}

void cmd_eval(const RunContext& ctx, const fs::path& data, const fs::path& model_path,
              const fs::path& detections, const fs::path& out) {
  const ExperimentConfig& c = ctx.config;
  const auto records = LoadSplit(SplitDir(data, "test"));
  std::vector<ImageDetections> dets;
  if (!model_path.empty()) {
    const MaskHeadModel model = load_checkpoint(model_path);
    const SweepConfig sweep = MakeSweep(ctx);
    dets.resize(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      dets[i] = {records[i].id,
                 predict_polygons(model, records[i],
                                  sweep_proposals(records[i], sweep.box_source, sweep.jitter),
                                  sweep.predict)};
    }
  } else {
    for (const ImageRecord& r : load_annotations(detections)) {
      ImageDetections d{r.id, {}};
      for (const TextInstance& t : r.instances) {
        if (!t.ignore) d.detections.emplace_back(t.polygon, 1.0);
      }
      dets.push_back(std::move(d));
    }
  }
  const EvalReport report = evaluate(dets, records, c.match_iou, ctx.jobs);
  MakeDir(out);
  WriteText(out / "report.json", report_json(report) + "\n");
  WriteText(out / "report.csv", ReportCsv(report));
  write_stamp(ctx, "eval", out);
  Log(ctx, fmt::format("R {:.4f} P {:.4f} F {:.4f}", report.recall, report.precision,
                       report.f_measure));
}

void cmd_rotbench(const RunContext& ctx, const fs::path& data,
                  const std::vector<std::pair<std::string, fs::path>>& models, const fs::path& out) {
  const auto records = LoadSplit(SplitDir(data, "test"));
  const SweepConfig sweep = MakeSweep(ctx);
  std::vector<std::pair<std::string, SweepReport>> series;
  nlohmann::ordered_json all;
  MakeDir(out);
  for (const auto& [label, path] : models) {
    const MaskHeadModel model = load_checkpoint(path);
    SweepReport report = rotation_sweep(model, records, sweep);
    WriteText(out / fmt::format("sweep_{}.csv", label), sweep_csv(report));
    all[label] = nlohmann::ordered_json::parse(sweep_json(report));
    std::string line = label + ":";
    for (const SweepEntry& e : report) line += fmt::format(" {:g}->{:.3f}", e.angle, e.report.f_measure);
    Log(ctx, line);
    series.emplace_back(label, std::move(report));
  }
  WriteText(out / "sweep.json", all.dump(2) + "\n");
  WriteText(out / "sweep.svg", sweep_svg(series));
  write_stamp(ctx, "rotbench", out);
}

void cmd_flops(const RunContext& ctx, const fs::path& out) {
  const ExperimentConfig& c = ctx.config;
  std::string csv = "decoder,proposals,encoder_flops,decoder_flops,total_flops\n";
  for (DecoderKind kind : kAllDecoderKinds) {
    const FlopCount f = count_flops(kind, c.flops_head, c.flops_proposals);
    csv += fmt::format("{},{},{:.0f},{:.0f},{:.0f}\n", to_string(kind), c.flops_proposals, f.encoder,
                       f.decoder, f.total());
  }
  const double fcfc = count_flops(DecoderKind::kFcFc, c.flops_head, c.flops_proposals).decoder;
  const double conv = count_flops(DecoderKind::kDeconvConv, c.flops_head, c.flops_proposals).decoder;
  if (!out.empty()) {
    MakeDir(out);
    WriteText(out / "flops.csv", csv);
    write_stamp(ctx, "flops", out);
  }
  Log(ctx, csv);
  Log(ctx, fmt::format("decoder fc-fc {:.3g}, deconv-conv {:.3g}, ratio {:.4f}", fcfc, conv,
                       conv > 0.0 ? fcfc / conv : 0.0));
}

}  // namespace mayor::cli
