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

#ifndef MAYOR_MASK_TARGETS_H_
#define MAYOR_MASK_TARGETS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mayor/data.h"
#include "mayor/geometry.h"
#include "mayor/tensor.h"

namespace mayor {

inline constexpr int kDefaultMaskSide = 28;
inline constexpr int kDefaultRoiSide = 14;
inline constexpr int kRoiChannels = 3;

/// Binary N x N mask target, row-major.
class MaskTarget {
 public:
  MaskTarget() = default;
  /// Throws std::invalid_argument if side < 2 or a cell is not 0/1.
  MaskTarget(int side, std::vector<std::uint8_t> cells);

  int side() const { return side_; }
  bool at(int row, int col) const {
    return cells_[static_cast<std::size_t>(row) * static_cast<std::size_t>(side_) +
                  static_cast<std::size_t>(col)] != 0;
  }
  std::span<const std::uint8_t> cells() const { return cells_; }
  std::size_t count() const;

  friend bool operator==(const MaskTarget&, const MaskTarget&) = default;

 private:
  int side_ = 0;
  std::vector<std::uint8_t> cells_;
};

enum class LearningMode { kPixelAligned, kInstanceAware };

/// Area-averages `mask` over `box` onto an N x N grid and keeps cells with
/// coverage >= 0.5. Pixels outside the canvas count as background.
MaskTarget crop_resize_mask(const BitMask& mask, const AABox& box, int side = kDefaultMaskSide);

/// Target cropped by the proposal.
MaskTarget pixel_aligned_target(const BitMask& instance_mask, const AABox& proposal,
                                int side = kDefaultMaskSide);
/// Target cropped by the tight box of the instance, whatever the proposal.
MaskTarget instance_aware_target(const Polygon& instance, Size canvas,
                                 int side = kDefaultMaskSide);

/// RoI feature surrogate, shape {3, side, side}: bilinear intensity under the
/// box, then x and y cell-center coordinates normalized to [-1, 1].
Tensor roi_features(const GrayImage& image, const AABox& box, int side = kDefaultRoiSide);

/// Highest box-IoU non-ignore instance (lowest index on ties); nullopt when no
/// such instance overlaps the box.
std::optional<std::size_t> match_instance(const AABox& box,
                                          std::span<const TextInstance> instances);

struct RoISample {
  AABox proposal;
  std::size_t gt_index = 0;
  Tensor features;
  MaskTarget target;
};

struct SampleDims {
  int roi_side = kDefaultRoiSide;
  int mask_side = kDefaultMaskSide;
};

/// Training samples for the proposals of one record. Proposals that overlap
/// no instance are skipped. Requires record.pixels.
std::vector<RoISample> build_samples(const ImageRecord& record, std::span<const AABox> proposals,
                                     LearningMode mode, const SampleDims& dims = {});

}  // namespace mayor

#endif  // MAYOR_MASK_TARGETS_H_
