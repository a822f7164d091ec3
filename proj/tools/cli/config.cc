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

#include "config.h"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mayor/random.h"

namespace mayor::cli {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double ParseDouble(std::string_view key, std::string_view text) {
  const std::string t = Trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument(fmt::format("{}: expected a number, got '{}'", key, text));
  }
  return v;
}

long long ParseInt(std::string_view key, std::string_view text) {
  const std::string t = Trim(text);
  long long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument(fmt::format("{}: expected an integer, got '{}'", key, text));
  }
  return v;
}

int ParseSmallInt(std::string_view key, std::string_view text) {
  const long long v = ParseInt(key, text);
  if (v < -(1LL << 30) || v > (1LL << 30)) {
    throw std::invalid_argument(fmt::format("{}: value {} out of range", key, v));
  }
  return static_cast<int>(v);
}

bool ParseBool(std::string_view key, std::string_view text) {
  const std::string t = Trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw std::invalid_argument(fmt::format("{}: expected true or false, got '{}'", key, text));
}

std::vector<std::string> Split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(Trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> ParseDoubles(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (const std::string& part : Split(text, ',')) out.push_back(ParseDouble(key, part));
  return out;
}

std::vector<int> ParseInts(std::string_view key, std::string_view text) {
  std::vector<int> out;
  for (const std::string& part : Split(text, ',')) out.push_back(ParseSmallInt(key, part));
  return out;
}

std::string Join(const auto& values, std::string_view sep = ",") {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += sep;
    out += fmt::format("{}", v);
  }
  return out;
}

std::string_view ModeName(LearningMode m) {
  return m == LearningMode::kInstanceAware ? "instance-aware" : "pixel-aligned";
}

std::string_view LossName(MatchingLossMode m) {
  switch (m) {
    case MatchingLossMode::kLocalizationOnly:
      return "loc";
    case MatchingLossMode::kObjectnessOnly:
      return "obj";
    default:
      return "both";
  }
}

struct Entry {
  std::string name;
  std::string doc;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Entry Num(std::string name, std::string doc, T ExperimentConfig::*field) {
  return {name, std::move(doc),
          [field, name](ExperimentConfig& c, std::string_view v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*field = ParseDouble(name, v);
            } else {
              c.*field = static_cast<T>(ParseInt(name, v));
            }
          },
          [field](const ExperimentConfig& c) { return fmt::format("{}", c.*field); }};
}

// Accessor-based entry for nested fields.
template <typename Get>
Entry Nested(std::string name, std::string doc, Get ref) {
  using T = std::remove_reference_t<decltype(ref(std::declval<ExperimentConfig&>()))>;
  return {name, std::move(doc),
          [ref, name](ExperimentConfig& c, std::string_view v) {
            if constexpr (std::is_same_v<T, bool>) {
              ref(c) = ParseBool(name, v);
            } else if constexpr (std::is_floating_point_v<T>) {
              ref(c) = ParseDouble(name, v);
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
              const long long n = ParseInt(name, v);
              if (n < 0) throw std::invalid_argument(fmt::format("{}: must be >= 0", name));
              ref(c) = static_cast<std::uint64_t>(n);
            } else {
              ref(c) = ParseSmallInt(name, v);
            }
          },
          [ref](const ExperimentConfig& c) {
            auto& mut = const_cast<ExperimentConfig&>(c);
            if constexpr (std::is_same_v<T, bool>) return std::string(ref(mut) ? "true" : "false");
            else return fmt::format("{}", ref(mut));
          }};
}

const std::vector<Entry>& Entries() {
  static const std::vector<Entry> entries = [] {
    using C = ExperimentConfig;
    std::vector<Entry> e;
    e.push_back(Nested("run.seed", "root seed; every random stream derives from it",
                       [](C& c) -> std::uint64_t& { return c.seed; }));

    e.push_back(Nested("synth.width", "canvas width in pixels",
                       [](C& c) -> int& { return c.synth.canvas.width; }));
    e.push_back(Nested("synth.height", "canvas height in pixels",
                       [](C& c) -> int& { return c.synth.canvas.height; }));
    e.push_back(Nested("synth.stripes_min", "fewest stripes per scene",
                       [](C& c) -> int& { return c.synth.stripe_count.lo; }));
    e.push_back(Nested("synth.stripes_max", "most stripes per scene",
                       [](C& c) -> int& { return c.synth.stripe_count.hi; }));
    const std::pair<const char*, Range SynthConfig::*> ranges[] = {
        {"thickness", &SynthConfig::thickness},     {"gap", &SynthConfig::gap},
        {"length", &SynthConfig::length},           {"orientation", &SynthConfig::orientation},
        {"foreground", &SynthConfig::foreground},   {"background", &SynthConfig::background},
    };
    for (const auto& [name, field] : ranges) {
      e.push_back(Nested(fmt::format("synth.{}_min", name), fmt::format("lower bound of {}", name),
                         [field](C& c) -> double& { return (c.synth.*field).lo; }));
      e.push_back(Nested(fmt::format("synth.{}_max", name), fmt::format("upper bound of {}", name),
                         [field](C& c) -> double& { return (c.synth.*field).hi; }));
    }
    e.push_back(Nested("synth.noise", "half-width of uniform pixel noise",
                       [](C& c) -> double& { return c.synth.noise; }));
    e.push_back(Nested("synth.placement_jitter", "stack offset as a fraction of the short side",
                       [](C& c) -> double& { return c.synth.placement_jitter; }));
    e.push_back(Num("synth.train_scenes", "scenes in the train split", &C::train_scenes));
    e.push_back(Num("synth.test_scenes", "scenes in the test split", &C::test_scenes));

    e.push_back({"anchors.strides", "feature strides, one per level",
                 [](C& c, std::string_view v) { c.anchors.strides = ParseInts("anchors.strides", v); },
                 [](const C& c) { return Join(c.anchors.strides); }});
    e.push_back({"anchors.scales", "anchor side (sqrt of area), one per level",
                 [](C& c, std::string_view v) { c.anchors.scales = ParseDoubles("anchors.scales", v); },
                 [](const C& c) { return Join(c.anchors.scales); }});
    e.push_back({"anchors.ratios", "height / width ratios",
                 [](C& c, std::string_view v) {
                   c.anchors.aspect_ratios = ParseDoubles("anchors.ratios", v);
                 },
                 [](const C& c) { return Join(c.anchors.aspect_ratios); }});

    e.push_back(Nested("assignment.positive", "standard positive IoU threshold",
                       [](C& c) -> double& { return c.standard.positive_threshold; }));
    e.push_back(Nested("assignment.negative", "standard negative IoU threshold",
                       [](C& c) -> double& { return c.standard.negative_threshold; }));
    e.push_back(Nested("assignment.rescue", "force each GT's best anchor positive",
                       [](C& c) -> bool& { return c.standard.rescue_low_quality; }));
    e.push_back(Num("assignment.k", "positives per GT in adaptive assignment", &C::k));
    e.push_back({"assignment.loss", "matching loss terms: both, loc or obj",
                 [](C& c, std::string_view v) {
                   const std::string t = Trim(v);
                   if (t == "both") c.loss_mode = MatchingLossMode::kBoth;
                   else if (t == "loc") c.loss_mode = MatchingLossMode::kLocalizationOnly;
                   else if (t == "obj") c.loss_mode = MatchingLossMode::kObjectnessOnly;
                   else throw std::invalid_argument(
                       fmt::format("assignment.loss: expected both, loc or obj, got '{}'", v));
                 },
                 [](const C& c) { return std::string(LossName(c.loss_mode)); }});
    e.push_back({"assignment.ks", "k values swept by assign-bench",
                 [](C& c, std::string_view v) { c.ks = ParseInts("assignment.ks", v); },
                 [](const C& c) { return Join(c.ks); }});
    e.push_back({"assignment.ratio_sets", "ratio sets swept by assign-bench, ';'-separated",
                 [](C& c, std::string_view v) {
                   c.ratio_sets.clear();
                   for (const std::string& set : Split(v, ';')) {
                     c.ratio_sets.push_back(ParseDoubles("assignment.ratio_sets", set));
                   }
                 },
                 [](const C& c) {
                   std::vector<std::string> sets;
                   for (const auto& s : c.ratio_sets) sets.push_back(Join(s));
                   return Join(sets, ";");
                 }});

    e.push_back(Nested("rpn.sharpness", "objectness slope around IoU 0.5",
                       [](C& c) -> double& { return c.rpn.sharpness; }));
    e.push_back(Nested("rpn.objectness_noise", "std of objectness logit noise",
                       [](C& c) -> double& { return c.rpn.objectness_noise; }));
    e.push_back(Nested("rpn.delta_noise", "std of delta noise at IoU 0",
                       [](C& c) -> double& { return c.rpn.delta_noise; }));

    e.push_back({"head.decoder", "deconv-conv, deconv-lc, deconv-fc or fc-fc",
                 [](C& c, std::string_view v) {
                   const auto k = parse_decoder_kind(Trim(v));
                   if (!k) throw std::invalid_argument(fmt::format("head.decoder: unknown decoder '{}'", v));
                   c.decoder = *k;
                 },
                 [](const C& c) { return std::string(to_string(c.decoder)); }});
    e.push_back(Nested("head.input_side", "RoI feature side",
                       [](C& c) -> int& { return c.head.input_side; }));
    e.push_back(Nested("head.channels", "encoder width",
                       [](C& c) -> int& { return c.head.channels; }));
    e.push_back(Nested("head.output_side", "mask side",
                       [](C& c) -> int& { return c.head.output_side; }));
    e.push_back(Nested("head.hidden", "fc-fc hidden width",
                       [](C& c) -> int& { return c.head.hidden; }));
    e.push_back({"head.mode", "pixel-aligned or instance-aware targets",
                 [](C& c, std::string_view v) {
                   const std::string t = Trim(v);
                   if (t == "pixel-aligned") c.mode = LearningMode::kPixelAligned;
                   else if (t == "instance-aware") c.mode = LearningMode::kInstanceAware;
                   else throw std::invalid_argument(fmt::format(
                       "head.mode: expected pixel-aligned or instance-aware, got '{}'", v));
                 },
                 [](const C& c) { return std::string(ModeName(c.mode)); }});

    e.push_back(Nested("train.lr", "learning rate",
                       [](C& c) -> double& { return c.train.learning_rate; }));
    e.push_back(Nested("train.momentum", "SGD momentum",
                       [](C& c) -> double& { return c.train.momentum; }));
    e.push_back(Nested("train.iterations", "SGD iterations",
                       [](C& c) -> int& { return c.train.iterations; }));
    e.push_back(Nested("train.warmup", "linear warmup iterations",
                       [](C& c) -> int& { return c.train.warmup_iterations; }));
    e.push_back(Nested("train.batch", "minibatch size",
                       [](C& c) -> int& { return c.train.batch_size; }));
    e.push_back(Nested("train.lambda_rcnn", "detection-branch loss weight (not trained here)",
                       [](C& c) -> double& { return c.train.lambda_rcnn; }));
    e.push_back(Nested("train.lambda_mask", "mask loss weight",
                       [](C& c) -> double& { return c.train.lambda_mask; }));
    e.push_back(Nested("train.jitter_scale", "log-scale noise of training proposals",
                       [](C& c) -> double& { return c.train_jitter.scale_noise; }));
    e.push_back(Nested("train.jitter_shift", "center noise of training proposals",
                       [](C& c) -> double& { return c.train_jitter.shift_noise; }));
    e.push_back(Nested("train.proposals_per_gt", "training proposals per instance",
                       [](C& c) -> int& { return c.train_jitter.per_gt; }));

    e.push_back(Num("eval.iou", "match IoU threshold", &C::match_iou));
    e.push_back(Nested("eval.mask_threshold", "mask probability threshold",
                       [](C& c) -> double& { return c.predict.mask_threshold; }));
    e.push_back(Nested("eval.nms", "polygon NMS IoU threshold",
                       [](C& c) -> double& { return c.predict.nms_threshold; }));
    e.push_back({"eval.angles", "rotation angles in degrees",
                 [](C& c, std::string_view v) { c.angles = ParseDoubles("eval.angles", v); },
                 [](const C& c) { return Join(c.angles); }});
    e.push_back({"eval.boxes", "gt or predicted (jittered ground truth)",
                 [](C& c, std::string_view v) {
                   const std::string t = Trim(v);
                   if (t == "gt") c.box_source = BoxSource::kGroundTruth;
                   else if (t == "predicted") c.box_source = BoxSource::kPredicted;
                   else throw std::invalid_argument(
                       fmt::format("eval.boxes: expected gt or predicted, got '{}'", v));
                 },
                 [](const C& c) {
                   return std::string(c.box_source == BoxSource::kGroundTruth ? "gt" : "predicted");
                 }});
    e.push_back(Nested("eval.jitter_scale", "log-scale noise of predicted boxes",
                       [](C& c) -> double& { return c.eval_jitter.scale_noise; }));
    e.push_back(Nested("eval.jitter_shift", "center noise of predicted boxes",
                       [](C& c) -> double& { return c.eval_jitter.shift_noise; }));

    e.push_back(Nested("flops.input_side", "RoI feature side",
                       [](C& c) -> int& { return c.flops_head.input_side; }));
    e.push_back(Nested("flops.input_channels", "RoI feature channels",
                       [](C& c) -> int& { return c.flops_head.input_channels; }));
    e.push_back(Nested("flops.channels", "encoder width",
                       [](C& c) -> int& { return c.flops_head.channels; }));
    e.push_back(Nested("flops.output_side", "mask side",
                       [](C& c) -> int& { return c.flops_head.output_side; }));
    e.push_back(Nested("flops.hidden", "fc-fc hidden width",
                       [](C& c) -> int& { return c.flops_head.hidden; }));
    e.push_back(Num("flops.proposals", "proposals per image", &C::flops_proposals));
    return e;
  }();
  return entries;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = [] {
    std::vector<ConfigKey> out;
    for (const Entry& e : Entries()) out.push_back({e.name, e.doc});
    return out;
  }();
  return schema;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  for (const Entry& e : Entries()) {
    if (e.name == key) {
      e.set(cfg, value);
      return;
    }
  }
  throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.message()));
  }
  ExperimentConfig cfg;
  for (const auto& [section, keys] : tree) {
    if (keys.empty()) {
      throw std::invalid_argument(
          fmt::format("{}: key '{}' outside a section", path.string(), section));
    }
    for (const auto& [key, value] : keys) {
      try {
        set_config_value(cfg, section + "." + key, value.data());
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
      }
    }
  }
  return cfg;
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const Entry& e : Entries()) {
    const auto dot = e.name.find('.');
    const std::string s = e.name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += fmt::format("[{}]\n", s);
      section = s;
    }
    out += fmt::format("{} = {}\n", e.name.substr(dot + 1), e.get(cfg));
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  return fmt::format("{:016x}", hash_string(to_ini(cfg)));
}

void validate(const ExperimentConfig& cfg) {
  cfg.synth.Validate();
  cfg.anchors.Validate();
  cfg.train.Validate();
  if (cfg.train_scenes < 1 || cfg.test_scenes < 1) {
    throw std::invalid_argument("synth.train_scenes and synth.test_scenes must be >= 1");
  }
  if (cfg.k < 1) throw std::invalid_argument("assignment.k must be >= 1");
  for (int k : cfg.ks) {
    if (k < 1) throw std::invalid_argument("assignment.ks entries must be >= 1");
  }
  if (cfg.standard.negative_threshold > cfg.standard.positive_threshold) {
    throw std::invalid_argument("assignment.negative must not exceed assignment.positive");
  }
  for (const auto& set : cfg.ratio_sets) {
    for (double r : set) {
      if (!(r > 0.0)) throw std::invalid_argument("assignment.ratio_sets entries must be > 0");
    }
  }
  if (cfg.head.input_channels != kRoiChannels) {
    throw std::invalid_argument("head input channels are fixed by the RoI features");
  }
  if (cfg.train_jitter.per_gt < 1 || cfg.eval_jitter.per_gt < 1) {
    throw std::invalid_argument("train.proposals_per_gt must be >= 1");
  }
  if (!(cfg.match_iou > 0.0 && cfg.match_iou <= 1.0)) {
    throw std::invalid_argument("eval.iou must lie in (0, 1]");
  }
  if (!(cfg.predict.mask_threshold > 0.0 && cfg.predict.mask_threshold < 1.0)) {
    throw std::invalid_argument("eval.mask_threshold must lie in (0, 1)");
  }
  // Construction checks the decoder / shape combination.
  MaskHeadModel probe_shape(cfg.decoder, HeadShape{cfg.head.input_side, cfg.head.input_channels, 1,
                                                   cfg.head.output_side, 1});
  (void)probe_shape;
}

std::uint64_t stream_seed(const ExperimentConfig& cfg, Stream stream) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(stream));
}

}  // namespace mayor::cli
