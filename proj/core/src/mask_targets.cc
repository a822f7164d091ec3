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

#include "mayor/mask_targets.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace mayor {

MaskTarget::MaskTarget(int side, std::vector<std::uint8_t> cells)
    : side_(side), cells_(std::move(cells)) {
  if (side_ < 2) throw std::invalid_argument("MaskTarget: side must be >= 2");
  if (cells_.size() != static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_)) {
    throw std::invalid_argument("MaskTarget: cell count must be side * side");
  }
  for (std::uint8_t c : cells_) {
    if (c > 1) throw std::invalid_argument("MaskTarget: cells must be 0 or 1");
  }
}

std::size_t MaskTarget::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

namespace {

struct Overlap {
  int pixel;
  double length;
};

// Pixels of [0, extent) overlapping each of `side` equal cells of [lo, hi),
// with the overlap length normalized by the cell length.
std::vector<std::vector<Overlap>> CellOverlaps(double lo, double hi, int side, int extent) {
  std::vector<std::vector<Overlap>> out(static_cast<std::size_t>(side));
  const double step = (hi - lo) / side;
  for (int c = 0; c < side; ++c) {
    const double a = lo + c * step;
    const double b = c + 1 == side ? hi : lo + (c + 1) * step;
    const int first = std::max(0, static_cast<int>(std::floor(std::max(a, -1.0))));
    const int last = std::min(extent - 1, static_cast<int>(std::ceil(std::min(b, extent + 1.0))) - 1);
    for (int p = first; p <= last; ++p) {
      const double len = std::min(b, p + 1.0) - std::max(a, static_cast<double>(p));
      if (len > 0.0) out[static_cast<std::size_t>(c)].push_back({p, len / (b - a)});
    }
  }
  return out;
}

}  // namespace

MaskTarget crop_resize_mask(const BitMask& mask, const AABox& box, int side) {
  if (side < 2) throw std::invalid_argument("crop_resize_mask: side must be >= 2");
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw std::invalid_argument("crop_resize_mask: box must have positive extent");
  }
  const auto xs = CellOverlaps(box.x_min(), box.x_max(), side, mask.width());
  const auto ys = CellOverlaps(box.y_min(), box.y_max(), side, mask.height());
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      double coverage = 0.0;
      for (const Overlap& oy : ys[static_cast<std::size_t>(r)]) {
        for (const Overlap& ox : xs[static_cast<std::size_t>(c)]) {
          if (mask.get(ox.pixel, oy.pixel)) coverage += ox.length * oy.length;
        }
      }
      cells[static_cast<std::size_t>(r) * static_cast<std::size_t>(side) +
            static_cast<std::size_t>(c)] = coverage >= 0.5 ? 1 : 0;
    }
  }
  return MaskTarget(side, std::move(cells));
}

MaskTarget pixel_aligned_target(const BitMask& instance_mask, const AABox& proposal, int side) {
  return crop_resize_mask(instance_mask, proposal, side);
}

MaskTarget instance_aware_target(const Polygon& instance, Size canvas, int side) {
  return crop_resize_mask(rasterize(instance, canvas), instance.bounds(), side);
}

Tensor roi_features(const GrayImage& image, const AABox& box, int side) {
  if (side < 1) throw std::invalid_argument("roi_features: side must be >= 1");
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw std::invalid_argument("roi_features: box must have positive extent");
  }
  const std::size_t plane = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  Tensor t({kRoiChannels, side, side});
  for (int r = 0; r < side; ++r) {
    const double v = (r + 0.5) / side;
    const double y = box.y_min() + v * box.height();
    for (int c = 0; c < side; ++c) {
      const double u = (c + 0.5) / side;
      const double x = box.x_min() + u * box.width();
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(side) +
                            static_cast<std::size_t>(c);
      t[i] = image.sample(x, y);
      t[plane + i] = 2.0 * u - 1.0;
      t[2 * plane + i] = 2.0 * v - 1.0;
    }
  }
  return t;
}

std::optional<std::size_t> match_instance(const AABox& box,
                                          std::span<const TextInstance> instances) {
  std::optional<std::size_t> best;
  double best_iou = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].ignore) continue;
    const double iou = box_iou(box, instances[i].polygon.bounds());
    if (iou > best_iou) {
      best_iou = iou;
      best = i;
    }
  }
  return best;
}

std::vector<RoISample> build_samples(const ImageRecord& record, std::span<const AABox> proposals,
                                     LearningMode mode, const SampleDims& dims) {
  if (!record.pixels) throw std::invalid_argument("build_samples: record has no pixels");
  std::vector<std::optional<BitMask>> masks(record.instances.size());
  std::vector<RoISample> samples;
  samples.reserve(proposals.size());
  for (const AABox& proposal : proposals) {
    if (!(proposal.width() > 0.0) || !(proposal.height() > 0.0)) continue;
    const auto gt = match_instance(proposal, record.instances);
    if (!gt) continue;
    const Polygon& poly = record.instances[*gt].polygon;
    auto& mask = masks[*gt];
    if (!mask) mask = rasterize(poly, record.size);
    const AABox crop = mode == LearningMode::kPixelAligned ? proposal : poly.bounds();
    samples.push_back(RoISample{proposal, *gt, roi_features(*record.pixels, proposal, dims.roi_side),
                                crop_resize_mask(*mask, crop, dims.mask_side)});
  }
  return samples;
}

}  // namespace mayor
