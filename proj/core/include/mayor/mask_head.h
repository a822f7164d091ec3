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

#ifndef MAYOR_MASK_HEAD_H_
#define MAYOR_MASK_HEAD_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mayor/aligned.h"
#include "mayor/data.h"
#include "mayor/geometry.h"
#include "mayor/mask_targets.h"
#include "mayor/tensor.h"

namespace mayor {

enum class DecoderKind { kDeconvConv, kDeconvLC, kDeconvFC, kFcFc };

inline constexpr DecoderKind kAllDecoderKinds[] = {DecoderKind::kDeconvConv, DecoderKind::kDeconvLC,
                                                   DecoderKind::kDeconvFC, DecoderKind::kFcFc};

std::string_view to_string(DecoderKind kind);
/// Accepts "deconv-conv", "deconv-lc", "deconv-fc" and "fc-fc".
std::optional<DecoderKind> parse_decoder_kind(std::string_view name);

struct HeadShape {
  int input_side = kDefaultRoiSide;
  int input_channels = kRoiChannels;
  int channels = 32;
  int output_side = kDefaultMaskSide;
  /// Hidden width of the FcFc decoder.
  int hidden = 256;

  friend bool operator==(const HeadShape&, const HeadShape&) = default;
};

/// One layer of the fixed architecture. Weight layouts, all row-major:
/// conv (out, in, 3, 3); deconv (out, 2, 2, in); pointwise (in);
/// locally connected (side * side, in); dense (out, in).
struct LayerSpec {
  enum class Type { kConv3x3, kDeconv2x2, kPointwise, kLocallyConnected, kDense };

  Type type;
  std::string name;
  int in_channels = 0;
  int out_channels = 0;
  /// Spatial side of the input; 1 for dense layers.
  int in_side = 1;
  bool relu = false;
  std::size_t weight_offset = 0;
  std::size_t weight_size = 0;
  std::size_t bias_offset = 0;
  std::size_t bias_size = 0;

  int out_side() const;
  std::size_t input_size() const;
  std::size_t output_size() const;
};

struct ParameterBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Four 3x3 conv + ReLU encoder layers followed by the decoder of `kind`.
/// Parameters and gradients live in flat buffers in layer order, weight before
/// bias.
class MaskHeadModel {
 public:
  /// Throws std::invalid_argument for non-positive dims, or when a deconv
  /// decoder is asked for output_side != 2 * input_side.
  MaskHeadModel(DecoderKind kind, const HeadShape& shape);

  DecoderKind kind() const { return kind_; }
  const HeadShape& shape() const { return shape_; }
  std::span<const LayerSpec> layers() const { return layers_; }

  std::size_t parameter_count() const { return params_.size(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> gradients() { return grads_; }
  std::span<const double> gradients() const { return grads_; }

  /// Blocks named "<layer>.weight" and "<layer>.bias".
  std::vector<ParameterBlock> blocks() const;
  /// Throws std::out_of_range for an unknown name.
  std::span<double> block(std::string_view name);
  std::span<const double> block(std::string_view name) const;

  /// Test hook: when set, every ReLU acts as the identity.
  void set_linear(bool linear) { linear_ = linear; }
  bool linear() const { return linear_; }

 private:
  DecoderKind kind_;
  HeadShape shape_;
  std::vector<LayerSpec> layers_;
  AlignedVector params_;
  AlignedVector grads_;
  bool linear_ = false;
};

/// Builds a model with weights uniform in +-sqrt(6 / (fan_in + fan_out)) drawn
/// from `seed`, biases zero.
MaskHeadModel build_model(DecoderKind kind, const HeadShape& shape, std::uint64_t seed);

/// Logits for one {input_channels, input_side, input_side} feature tensor,
/// row-major output_side x output_side.
std::vector<double> forward(const MaskHeadModel& model, const Tensor& features);
std::vector<std::vector<double>> forward_batch(const MaskHeadModel& model,
                                               std::span<const Tensor> features, int jobs = 1);

/// Mean binary cross-entropy of sigmoid(logits) against the target.
double mask_loss(std::span<const double> logits, const MaskTarget& target);

/// Overwrites the model gradients with d(mask_loss)/d(params); returns the loss.
double backward(MaskHeadModel& model, const Tensor& features, const MaskTarget& target);
/// Summed loss and summed gradients over samples[indices]. The result does not
/// depend on `jobs`.
double backward_batch(MaskHeadModel& model, std::span<const RoISample> samples,
                      std::span<const std::size_t> indices, int jobs = 1);

struct GradCheckOptions {
  std::uint64_t seed = 0;
  double fraction = 0.01;
  std::size_t min_parameters = 50;
  /// Always checked in addition to the random subset.
  std::vector<std::size_t> extra_indices;
  /// Applied to the analytic gradient before comparison (mutation testing).
  std::function<void(std::span<double>)> corrupt;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  /// Parameters whose perturbation flipped a ReLU; they are replaced by other
  /// draws because the loss is not differentiable across the kink.
  std::size_t skipped_kinks = 0;
};

/// Central finite differences on a seeded random parameter subset. Relative
/// error is |a - n| / max(1e-8, |a| + |n|). Throws std::invalid_argument for
/// eps outside [1e-6, 1e-3].
GradCheckResult grad_check(MaskHeadModel& model, const Tensor& features, const MaskTarget& target,
                           double eps = 1e-4, const GradCheckOptions& options = {});

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int iterations = 600;
  /// The learning rate ramps linearly from lr / warmup to lr over this many
  /// iterations.
  int warmup_iterations = 0;
  int batch_size = 16;
  std::uint64_t seed = 0;
  /// Loss weights of the full detector objective; only the mask term is
  /// trained here, scaled by lambda_mask.
  double lambda_rcnn = 1.0;
  double lambda_mask = 1.0;
  LearningMode mode = LearningMode::kPixelAligned;
  int jobs = 1;

  void Validate() const;
};

struct TrainHistory {
  /// Mean mask loss of the minibatch at each iteration.
  std::vector<double> loss;
};

/// Minibatch SGD with momentum (v = mu * v + g; p -= lr * v, g the batch-mean
/// gradient scaled by lambda_mask) over a seeded shuffle, reshuffled every epoch. Throws
/// std::runtime_error naming the iteration and learning rate if the loss stops
/// being finite.
TrainHistory train(MaskHeadModel& model, std::span<const RoISample> samples,
                   const TrainConfig& cfg);

struct PredictConfig {
  double mask_threshold = kDefaultMaskThreshold;
  double nms_threshold = kDefaultNmsThreshold;
  int jobs = 1;
};

/// Masks for every proposal pasted into its box, turned into the polygon of
/// the largest component and scored by the mean probability of the grid cells
/// at or above the mask threshold; followed by polygonal NMS. Proposals with an
/// empty pasted mask produce nothing.
std::vector<Detection> predict_polygons(const MaskHeadModel& model, const ImageRecord& image,
                                        std::span<const AABox> proposals,
                                        const PredictConfig& cfg = {});

struct FlopCount {
  double encoder = 0.0;
  double decoder = 0.0;
  double total() const { return encoder + decoder; }
};

/// Multiply-add counts (one fused multiply-add counts once), biases excluded,
/// scaled by the proposal count.
FlopCount count_flops(DecoderKind kind, const HeadShape& shape, std::size_t proposals);

/// Binary checkpoint: "MDL1", uint32 kind, five int32 dims (input_side,
/// input_channels, channels, output_side, hidden), uint64 parameter count,
/// then little-endian float64 parameters in layer order.
void save_checkpoint(const MaskHeadModel& model, const std::filesystem::path& path);
MaskHeadModel load_checkpoint(const std::filesystem::path& path);

/// "iteration,loss" CSV, one row per iteration.
void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);

}  // namespace mayor

#endif  // MAYOR_MASK_HEAD_H_
