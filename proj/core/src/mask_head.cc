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

#include "mayor/mask_head.h"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "layers.h"
#include "mayor/parallel.h"
#include "mayor/random.h"

namespace mayor {

using internal::Batch;

std::string_view to_string(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kDeconvConv:
      return "deconv-conv";
    case DecoderKind::kDeconvLC:
      return "deconv-lc";
    case DecoderKind::kDeconvFC:
      return "deconv-fc";
    case DecoderKind::kFcFc:
      return "fc-fc";
  }
  return "unknown";
}

std::optional<DecoderKind> parse_decoder_kind(std::string_view name) {
  for (DecoderKind kind : kAllDecoderKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

int LayerSpec::out_side() const {
  switch (type) {
    case Type::kDeconv2x2:
      return 2 * in_side;
    case Type::kDense:
      return 1;
    default:
      return in_side;
  }
}

std::size_t LayerSpec::input_size() const {
  return static_cast<std::size_t>(in_channels) * static_cast<std::size_t>(in_side) *
         static_cast<std::size_t>(in_side);
}

std::size_t LayerSpec::output_size() const {
  const auto s = static_cast<std::size_t>(out_side());
  return static_cast<std::size_t>(out_channels) * s * s;
}

MaskHeadModel::MaskHeadModel(DecoderKind kind, const HeadShape& shape) : kind_(kind), shape_(shape) {
  if (shape.input_side < 1 || shape.input_channels < 1 || shape.channels < 1 ||
      shape.output_side < 1 || shape.hidden < 1) {
    throw std::invalid_argument("MaskHeadModel: all dims must be positive");
  }
  if (kind != DecoderKind::kFcFc && shape.output_side != 2 * shape.input_side) {
    throw std::invalid_argument(
        fmt::format("MaskHeadModel: {} needs output_side = 2 * input_side, got {} and {}",
                    to_string(kind), shape.output_side, shape.input_side));
  }
  std::size_t offset = 0;
  auto add = [&](LayerSpec::Type type, std::string name, int in_c, int out_c, int side, bool relu,
                 std::size_t weights, std::size_t biases) {
    LayerSpec l{type, std::move(name), in_c, out_c, side, relu};
    l.weight_offset = offset;
    l.weight_size = weights;
    l.bias_offset = offset + weights;
    l.bias_size = biases;
    offset += weights + biases;
    layers_.push_back(std::move(l));
  };
  const auto c = static_cast<std::size_t>(shape.channels);
  const int n_in = shape.input_side;
  const auto p_out = static_cast<std::size_t>(shape.output_side) *
                     static_cast<std::size_t>(shape.output_side);
  for (int i = 0; i < 4; ++i) {
    const int in_c = i == 0 ? shape.input_channels : shape.channels;
    add(LayerSpec::Type::kConv3x3, fmt::format("enc{}", i), in_c, shape.channels, n_in, true,
        c * static_cast<std::size_t>(in_c) * 9, c);
  }
  if (kind == DecoderKind::kFcFc) {
    const std::size_t flat = c * static_cast<std::size_t>(n_in) * static_cast<std::size_t>(n_in);
    const auto hidden = static_cast<std::size_t>(shape.hidden);
    add(LayerSpec::Type::kDense, "fc1", static_cast<int>(flat), shape.hidden, 1, true,
        hidden * flat, hidden);
    add(LayerSpec::Type::kDense, "fc2", shape.hidden, static_cast<int>(p_out), 1, false,
        p_out * hidden, p_out);
  } else {
    add(LayerSpec::Type::kDeconv2x2, "deconv", shape.channels, shape.channels, n_in, true,
        c * c * 4, c);
    const int n = shape.output_side;
    switch (kind) {
      case DecoderKind::kDeconvConv:
        add(LayerSpec::Type::kPointwise, "pred", shape.channels, 1, n, false, c, 1);
        break;
      case DecoderKind::kDeconvLC:
        add(LayerSpec::Type::kLocallyConnected, "pred", shape.channels, 1, n, false, p_out * c,
            p_out);
        break;
      default:
        add(LayerSpec::Type::kDense, "pred", static_cast<int>(c * p_out), static_cast<int>(p_out),
            1, false, p_out * c * p_out, p_out);
        break;
    }
  }
  params_.assign(offset, 0.0);
  grads_.assign(offset, 0.0);
}

std::vector<ParameterBlock> MaskHeadModel::blocks() const {
  std::vector<ParameterBlock> out;
  for (const LayerSpec& l : layers_) {
    out.push_back({l.name + ".weight", l.weight_offset, l.weight_size});
    out.push_back({l.name + ".bias", l.bias_offset, l.bias_size});
  }
  return out;
}

std::span<double> MaskHeadModel::block(std::string_view name) {
  for (const ParameterBlock& b : blocks()) {
    if (b.name == name) return std::span<double>(params_).subspan(b.offset, b.size);
  }
  throw std::out_of_range(fmt::format("MaskHeadModel: no parameter block '{}'", name));
}

std::span<const double> MaskHeadModel::block(std::string_view name) const {
  return const_cast<MaskHeadModel*>(this)->block(name);
}

MaskHeadModel build_model(DecoderKind kind, const HeadShape& shape, std::uint64_t seed) {
  MaskHeadModel model(kind, shape);
  Rng rng(seed);
  std::span<double> params = model.parameters();
  for (const LayerSpec& l : model.layers()) {
    double fan_in = 0.0, fan_out = 0.0;
    switch (l.type) {
      case LayerSpec::Type::kConv3x3:
        fan_in = 9.0 * l.in_channels;
        fan_out = 9.0 * l.out_channels;
        break;
      case LayerSpec::Type::kDeconv2x2:
        fan_in = 4.0 * l.in_channels;
        fan_out = 4.0 * l.out_channels;
        break;
      case LayerSpec::Type::kPointwise:
      case LayerSpec::Type::kLocallyConnected:
        fan_in = l.in_channels;
        fan_out = 1.0;
        break;
      case LayerSpec::Type::kDense:
        fan_in = l.in_channels;
        fan_out = l.out_channels;
        break;
    }
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < l.weight_size; ++i) {
      params[l.weight_offset + i] = rng.uniform(-bound, bound);
    }
  }
  return model;
}

namespace {

void CheckFeatures(const MaskHeadModel& model, const Tensor& features) {
  const HeadShape& s = model.shape();
  const std::array<int, 3> want{s.input_channels, s.input_side, s.input_side};
  if (!std::equal(features.dims().begin(), features.dims().end(), want.begin(), want.end())) {
    throw std::invalid_argument(fmt::format(
        "mask head: features must have dims {{{}, {}, {}}}", want[0], want[1], want[2]));
  }
}

void CheckTarget(const MaskHeadModel& model, const MaskTarget& target) {
  if (target.side() != model.shape().output_side) {
    throw std::invalid_argument(fmt::format("mask head: target side {} differs from output side {}",
                                            target.side(), model.shape().output_side));
  }
}

template <typename GetFeatures>
Batch Pack(const MaskHeadModel& model, std::size_t count, GetFeatures&& get) {
  const auto rows = static_cast<Eigen::Index>(model.layers().front().input_size());
  Batch input(rows, static_cast<Eigen::Index>(count));
  for (std::size_t s = 0; s < count; ++s) {
    const Tensor& t = get(s);
    CheckFeatures(model, t);
    std::copy(t.values().begin(), t.values().end(), input.col(static_cast<Eigen::Index>(s)).data());
  }
  return input;
}

// acts[0] is the input, acts[i + 1] the output of layer i.
void ForwardPass(const MaskHeadModel& model, Batch input, std::vector<Batch>& acts, int jobs) {
  const auto layers = model.layers();
  acts.resize(layers.size() + 1);
  acts[0] = std::move(input);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    internal::LayerForward(layers[i], model.parameters().data(),
                           layers[i].relu && !model.linear(), acts[i], acts[i + 1], jobs);
  }
}

double Sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double CellLoss(double z, double t) {
  return std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
}

// Fills acts and gradients for the batch; returns the summed loss.
double BackwardPass(MaskHeadModel& model, Batch input,
                    std::span<const MaskTarget* const> targets, int jobs) {
  std::fill(model.gradients().begin(), model.gradients().end(), 0.0);
  std::vector<Batch> acts;
  ForwardPass(model, std::move(input), acts, jobs);
  const Batch& logits = acts.back();
  const Eigen::Index cells = logits.rows();
  Batch grad(cells, logits.cols());
  double total = 0.0;
  for (Eigen::Index s = 0; s < logits.cols(); ++s) {
    const MaskTarget& target = *targets[static_cast<std::size_t>(s)];
    double loss = 0.0;
    for (Eigen::Index i = 0; i < cells; ++i) {
      const double z = logits(i, s);
      const double t = target.cells()[static_cast<std::size_t>(i)];
      loss += CellLoss(z, t);
      grad(i, s) = (Sigmoid(z) - t) / static_cast<double>(cells);
    }
    total += loss / static_cast<double>(cells);
  }
  const auto layers = model.layers();
  Batch grad_in;
  for (std::size_t i = layers.size(); i-- > 0;) {
    internal::LayerBackward(layers[i], model.parameters().data(), layers[i].relu && !model.linear(),
                            acts[i], acts[i + 1], grad, i > 0 ? &grad_in : nullptr,
                            model.gradients().data(), jobs);
    if (i > 0) std::swap(grad, grad_in);
  }
  return total;
}

std::vector<std::uint8_t> ReluPattern(const MaskHeadModel& model, const Tensor& features) {
  std::vector<Batch> acts;
  ForwardPass(model, Pack(model, 1, [&](std::size_t) -> const Tensor& { return features; }), acts,
              1);
  std::vector<std::uint8_t> pattern;
  const auto layers = model.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i].relu || model.linear()) continue;
    for (Eigen::Index r = 0; r < acts[i + 1].rows(); ++r) {
      pattern.push_back(acts[i + 1](r, 0) > 0.0 ? 1 : 0);
    }
  }
  return pattern;
}

double LossAt(const MaskHeadModel& model, const Tensor& features, const MaskTarget& target) {
  return mask_loss(forward(model, features), target);
}

}  // namespace

std::vector<double> forward(const MaskHeadModel& model, const Tensor& features) {
  std::vector<Batch> acts;
  ForwardPass(model, Pack(model, 1, [&](std::size_t) -> const Tensor& { return features; }), acts,
              1);
  return {acts.back().data(), acts.back().data() + acts.back().size()};
}

std::vector<std::vector<double>> forward_batch(const MaskHeadModel& model,
                                               std::span<const Tensor> features, int jobs) {
  std::vector<std::vector<double>> out;
  if (features.empty()) return out;
  std::vector<Batch> acts;
  ForwardPass(model,
              Pack(model, features.size(), [&](std::size_t s) -> const Tensor& { return features[s]; }),
              acts, jobs);
  const Batch& logits = acts.back();
  out.reserve(features.size());
  for (Eigen::Index s = 0; s < logits.cols(); ++s) {
    out.emplace_back(logits.col(s).data(), logits.col(s).data() + logits.rows());
  }
  return out;
}

double mask_loss(std::span<const double> logits, const MaskTarget& target) {
  if (logits.size() != target.cells().size()) {
    throw std::invalid_argument("mask_loss: logit count differs from target cell count");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += CellLoss(logits[i], target.cells()[i]);
  return sum / static_cast<double>(logits.size());
}

double backward(MaskHeadModel& model, const Tensor& features, const MaskTarget& target) {
  CheckTarget(model, target);
  const MaskTarget* targets[] = {&target};
  return BackwardPass(model, Pack(model, 1, [&](std::size_t) -> const Tensor& { return features; }),
                      targets, 1);
}

double backward_batch(MaskHeadModel& model, std::span<const RoISample> samples,
                      std::span<const std::size_t> indices, int jobs) {
  if (indices.empty()) throw std::invalid_argument("backward_batch: empty batch");
  std::vector<const MaskTarget*> targets;
  targets.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= samples.size()) throw std::out_of_range("backward_batch: sample index out of range");
    CheckTarget(model, samples[i].target);
    targets.push_back(&samples[i].target);
  }
  return BackwardPass(
      model,
      Pack(model, indices.size(),
           [&](std::size_t s) -> const Tensor& { return samples[indices[s]].features; }),
      targets, jobs);
}

GradCheckResult grad_check(MaskHeadModel& model, const Tensor& features, const MaskTarget& target,
                           double eps, const GradCheckOptions& options) {
  if (!(eps >= 1e-6 && eps <= 1e-3)) {
    throw std::invalid_argument("grad_check: eps must lie in [1e-6, 1e-3]");
  }
  backward(model, features, target);
  std::vector<double> analytic(model.gradients().begin(), model.gradients().end());
  if (options.corrupt) options.corrupt(analytic);

  const std::size_t count = model.parameter_count();
  const auto want = std::min(
      count, std::max(options.min_parameters,
                      static_cast<std::size_t>(std::ceil(options.fraction * static_cast<double>(count)))));
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.seed);
  rng.shuffle(order);

  const std::vector<std::uint8_t> base_pattern = ReluPattern(model, features);
  std::span<double> params = model.parameters();
  GradCheckResult result;
  auto check = [&](std::size_t idx) {
    const double saved = params[idx];
    params[idx] = saved + eps;
    const double plus = LossAt(model, features, target);
    const bool kink_plus = ReluPattern(model, features) != base_pattern;
    params[idx] = saved - eps;
    const double minus = LossAt(model, features, target);
    const bool kink_minus = ReluPattern(model, features) != base_pattern;
    params[idx] = saved;
    if (kink_plus || kink_minus) {
      ++result.skipped_kinks;
      return false;
    }
    const double numeric = (plus - minus) / (2.0 * eps);
    const double a = analytic[idx];
    const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    if (result.checked == 0 || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = idx;
    }
    ++result.checked;
    return true;
  };
  for (std::size_t idx : options.extra_indices) {
    if (idx >= count) throw std::out_of_range("grad_check: extra index out of range");
    check(idx);
  }
  std::size_t taken = 0;
  for (std::size_t k = 0; k < order.size() && taken < want; ++k) {
    if (check(order[k])) ++taken;
  }
  return result;
}

void TrainConfig::Validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("TrainConfig: learning rate must be finite and non-negative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("TrainConfig: momentum must lie in [0, 1)");
  }
  if (iterations < 1) throw std::invalid_argument("TrainConfig: iterations must be >= 1");
  if (warmup_iterations < 0) throw std::invalid_argument("TrainConfig: warmup must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch size must be >= 1");
  if (jobs < 1) throw std::invalid_argument("TrainConfig: jobs must be >= 1");
}

TrainHistory train(MaskHeadModel& model, std::span<const RoISample> samples,
                   const TrainConfig& cfg) {
  cfg.Validate();
  if (samples.empty()) throw std::invalid_argument("train: no samples");
  const std::size_t batch = std::min(static_cast<std::size_t>(cfg.batch_size), samples.size());
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  rng.shuffle(order);
  std::size_t cursor = 0;

  std::vector<double> velocity(model.parameter_count(), 0.0);
  std::span<double> params = model.parameters();
  std::span<const double> grads = model.gradients();
  const double scale = cfg.lambda_mask / static_cast<double>(batch);

  TrainHistory history;
  history.loss.reserve(static_cast<std::size_t>(cfg.iterations));
  std::vector<std::size_t> indices(batch);
  for (int it = 0; it < cfg.iterations; ++it) {
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        rng.shuffle(order);
        cursor = 0;
      }
      indices[b] = order[cursor++];
    }
    std::sort(indices.begin(), indices.end());
    const double loss = backward_batch(model, samples, indices, cfg.jobs) / static_cast<double>(batch);
    if (!std::isfinite(loss)) {
      throw std::runtime_error(fmt::format("train: non-finite loss at iteration {} (lr {})", it,
                                           cfg.learning_rate));
    }
    history.loss.push_back(loss);
    const double lr = it < cfg.warmup_iterations
                          ? cfg.learning_rate * (it + 1) / cfg.warmup_iterations
                          : cfg.learning_rate;
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity[i] = cfg.momentum * velocity[i] + scale * grads[i];
      params[i] -= lr * velocity[i];
    }
  }
  return history;
}

std::vector<Detection> predict_polygons(const MaskHeadModel& model, const ImageRecord& image,
                                        std::span<const AABox> proposals,
                                        const PredictConfig& cfg) {
  if (!image.pixels) throw std::invalid_argument("predict_polygons: image has no pixels");
  std::vector<AABox> boxes;
  for (const AABox& p : proposals) {
    if (p.width() > 0.0 && p.height() > 0.0) boxes.push_back(p);
  }
  std::vector<Tensor> features(boxes.size());
  parallel_for(boxes.size(), cfg.jobs, [&](std::size_t i) {
    features[i] = roi_features(*image.pixels, boxes[i], model.shape().input_side);
  });
  constexpr std::size_t kChunk = 32;
  std::vector<std::vector<double>> logits;
  for (std::size_t begin = 0; begin < features.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, features.size() - begin);
    auto part = forward_batch(model, std::span<const Tensor>(features).subspan(begin, n), cfg.jobs);
    for (auto& l : part) logits.push_back(std::move(l));
  }

  const int side = model.shape().output_side;
  std::vector<std::optional<Detection>> found(boxes.size());
  parallel_for(boxes.size(), cfg.jobs, [&](std::size_t i) {
    std::vector<double> probs(logits[i].size());
    double sum = 0.0;
    std::size_t fg = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      probs[k] = Sigmoid(logits[i][k]);
      if (probs[k] >= cfg.mask_threshold) {
        sum += probs[k];
        ++fg;
      }
    }
    if (fg == 0) return;
    const BitMask mask =
        paste_mask(MaskGrid(side, std::move(probs)), boxes[i], image.size, cfg.mask_threshold);
    if (mask.empty()) return;
    found[i].emplace(mask_to_polygon(mask), std::clamp(sum / static_cast<double>(fg), 0.0, 1.0));
  });
  std::vector<Detection> candidates;
  for (auto& f : found) {
    if (f) candidates.push_back(std::move(*f));
  }
  std::vector<Detection> kept;
  for (std::size_t i : polygon_nms(candidates, cfg.nms_threshold)) kept.push_back(candidates[i]);
  return kept;
}

FlopCount count_flops(DecoderKind kind, const HeadShape& s, std::size_t proposals) {
  const double c_in = s.input_channels, c = s.channels;
  const double p_in = static_cast<double>(s.input_side) * s.input_side;
  const double p_out = static_cast<double>(s.output_side) * s.output_side;
  const double n = static_cast<double>(proposals);
  FlopCount f;
  f.encoder = 9.0 * (c_in * c + 3.0 * c * c) * p_in * n;
  const double deconv = c * c * 4.0 * p_in;
  switch (kind) {
    case DecoderKind::kDeconvConv:
    case DecoderKind::kDeconvLC:
      f.decoder = (deconv + c * p_out) * n;
      break;
    case DecoderKind::kDeconvFC:
      f.decoder = (deconv + c * p_out * p_out) * n;
      break;
    case DecoderKind::kFcFc:
      f.decoder = (c * p_in * s.hidden + static_cast<double>(s.hidden) * p_out) * n;
      break;
  }
  return f;
}

namespace {

constexpr char kMagic[4] = {'M', 'D', 'L', '1'};

template <typename T>
void PutLE(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(u & 0xff);
    u = static_cast<U>(u >> 8);
  }
  out.write(bytes, sizeof(T));
}

template <typename T>
T GetLE(std::istream& in, const std::filesystem::path& path) {
  using U = std::make_unsigned_t<T>;
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error(fmt::format("{}: truncated checkpoint", path.string()));
  }
  U u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | bytes[i]);
  return static_cast<T>(u);
}

}  // namespace

void save_checkpoint(const MaskHeadModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
  out.write(kMagic, 4);
  PutLE<std::uint32_t>(out, static_cast<std::uint32_t>(model.kind()));
  const HeadShape& s = model.shape();
  for (int d : {s.input_side, s.input_channels, s.channels, s.output_side, s.hidden}) {
    PutLE<std::int32_t>(out, d);
  }
  PutLE<std::uint64_t>(out, model.parameter_count());
  for (double v : model.parameters()) PutLE<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
}

MaskHeadModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("{}: cannot open checkpoint", path.string()));
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(fmt::format("{}: not a mask head checkpoint", path.string()));
  }
  const auto kind_raw = GetLE<std::uint32_t>(in, path);
  if (kind_raw > static_cast<std::uint32_t>(DecoderKind::kFcFc)) {
    throw std::runtime_error(fmt::format("{}: unknown decoder kind {}", path.string(), kind_raw));
  }
  HeadShape s;
  s.input_side = GetLE<std::int32_t>(in, path);
  s.input_channels = GetLE<std::int32_t>(in, path);
  s.channels = GetLE<std::int32_t>(in, path);
  s.output_side = GetLE<std::int32_t>(in, path);
  s.hidden = GetLE<std::int32_t>(in, path);
  MaskHeadModel model(static_cast<DecoderKind>(kind_raw), s);
  const auto count = GetLE<std::uint64_t>(in, path);
  if (count != model.parameter_count()) {
    throw std::runtime_error(fmt::format("{}: parameter count {} does not match the architecture ({})",
                                         path.string(), count, model.parameter_count()));
  }
  for (double& v : model.parameters()) v = std::bit_cast<double>(GetLE<std::uint64_t>(in, path));
  return model;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
  out << "iteration,loss\n";
  for (std::size_t i = 0; i < history.loss.size(); ++i) {
    out << fmt::format("{},{}\n", i, history.loss[i]);
  }
  if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
}

}  // namespace mayor
