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

#ifndef MAYOR_DATA_H_
#define MAYOR_DATA_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mayor/geometry.h"

namespace mayor {

/// Grayscale image with values in [0, 1], row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  Size size() const { return {width_, height_}; }
  double at(int x, int y) const { return pixels_[Index(x, y)]; }
  double& at(int x, int y) { return pixels_[Index(x, y)]; }
  std::span<const double> pixels() const { return pixels_; }

  /// Bilinear sample at continuous coordinate (x, y) with pixel centers at
  /// half-integers; zero outside the canvas.
  double sample(double x, double y) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

struct TextInstance {
  Polygon polygon;
  bool ignore = false;

  friend bool operator==(const TextInstance&, const TextInstance&) = default;
};

struct ImageRecord {
  std::string id;
  Size size;
  std::vector<TextInstance> instances;
  std::optional<GrayImage> pixels;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// Error raised while reading annotation files; what() names file and line.
class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kIgnoreToken = "###";

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

/// Dense parallel-stripe scene generator settings. Lengths and gaps are in
/// pixels, orientation in degrees counter-clockwise from horizontal.
struct SynthConfig {
  Size canvas{128, 128};
  IntRange stripe_count{3, 6};
  Range thickness{5.0, 9.0};
  Range gap{2.0, 4.0};
  Range length{48.0, 110.0};
  Range orientation{-10.0, 10.0};
  Range foreground{0.7, 0.95};
  Range background{0.05, 0.3};
  /// Half-width of the uniform pixel noise, at most 0.05.
  double noise = 0.05;
  /// Largest random offset of the stripe stack from the canvas center, as a
  /// fraction of the short canvas side.
  double placement_jitter = 0.1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a range is empty or inverted, gaps are
  /// below 1 pixel or thickness below 2 pixels.
  void Validate() const;
};

/// Parses one annotation line. Throws std::invalid_argument on malformed
/// input.
TextInstance parse_annotation_line(std::string_view line);
std::string format_annotation_line(const TextInstance& instance);

/// Reads every `gt_<id>.txt` in `root` (sorted by id). A sibling `<id>.pgm`
/// supplies pixels and canvas size; without one the canvas is the integer
/// extent of the annotations.
std::vector<ImageRecord> load_annotations(const std::filesystem::path& root);

/// Writes `gt_<id>.txt` for each record, plus `<id>.pgm` when pixels exist.
void save_annotations(std::span<const ImageRecord> records,
                      const std::filesystem::path& root);

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

/// One scene of parallel stripes; deterministic for a fixed cfg.seed.
/// Throws std::invalid_argument if no stripe can be placed.
ImageRecord gen_dense_scene(const SynthConfig& cfg, std::string id = "scene");

/// `count` scenes named `<prefix><index>` with per-scene seeds derived from
/// cfg.seed and the index.
std::vector<ImageRecord> gen_dense_dataset(const SynthConfig& cfg, int count,
                                           std::string_view prefix, int jobs = 1);

/// Rotates annotations and pixels (bilinear, zero fill) onto the expanded
/// canvas.
ImageRecord rotate_record(const ImageRecord& record, double angle_degrees);
std::vector<ImageRecord> rotate_dataset(std::span<const ImageRecord> dataset,
                                        double angle_degrees, int jobs = 1);

struct JitterConfig {
  double scale_noise = 0.0;
  double shift_noise = 0.0;
  int per_gt = 1;
  std::uint64_t seed = 0;
};

struct Proposal {
  AABox box;
  std::size_t gt_index = 0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Perturbed copies of ground-truth boxes: center shifted by
/// U(-shift, shift) * extent, extent scaled by exp(U(-scale, scale)), clipped
/// to the canvas.
std::vector<Proposal> jitter_proposals(std::span<const AABox> gts, Size canvas,
                                       const JitterConfig& cfg);

/// Tight boxes of the instances, in instance order.
std::vector<AABox> instance_boxes(std::span<const TextInstance> instances);

}  // namespace mayor

#endif  // MAYOR_DATA_H_
