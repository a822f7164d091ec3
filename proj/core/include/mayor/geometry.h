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

#ifndef MAYOR_GEOMETRY_H_
#define MAYOR_GEOMETRY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mayor {

/// Continuous image coordinate in pixels. Pixel (i, j) covers [i, i+1) x [j, j+1)
/// and has its center at (i + 0.5, j + 0.5).
class Point {
 public:
  Point() = default;
  /// Throws std::invalid_argument on NaN or infinite input.
  Point(double x, double y);

  double x() const { return x_; }
  double y() const { return y_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

struct Size {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size&, const Size&) = default;
};

class AABox {
 public:
  AABox() = default;
  /// Throws std::invalid_argument unless x_min <= x_max, y_min <= y_max and all
  /// values are finite.
  AABox(double x_min, double y_min, double x_max, double y_max);

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min_ + x_max_); }
  double center_y() const { return 0.5 * (y_min_ + y_max_); }

  /// Box of the given center and extent.
  static AABox FromCenter(double cx, double cy, double w, double h);

  friend bool operator==(const AABox&, const AABox&) = default;

 private:
  double x_min_ = 0.0;
  double y_min_ = 0.0;
  double x_max_ = 0.0;
  double y_max_ = 0.0;
};

/// Simple closed polygon. Construction drops consecutive duplicate vertices
/// (including a repeated closing vertex) and normalizes to positive shoelace
/// orientation. Throws std::invalid_argument for fewer than three distinct
/// vertices or zero signed area.
class Polygon {
 public:
  explicit Polygon(std::vector<Point> vertices);

  std::span<const Point> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  /// Tight axis-aligned bounds.
  AABox bounds() const;

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point> vertices_;
};

/// Row-major binary raster.
class BitMask {
 public:
  BitMask() = default;
  BitMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  Size size() const { return {width_, height_}; }

  bool get(int x, int y) const { return bits_[Index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[Index(x, y)] = value ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  friend bool operator==(const BitMask&, const BitMask&) = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Square grid of per-cell values (mask probabilities), row-major.
class MaskGrid {
 public:
  MaskGrid() = default;
  explicit MaskGrid(int side, double fill = 0.0);
  MaskGrid(int side, std::vector<double> values);

  int side() const { return side_; }
  double at(int row, int col) const { return values_[Index(row, col)]; }
  double& at(int row, int col) { return values_[Index(row, col)]; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t Index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(side_) +
           static_cast<std::size_t>(col);
  }

  int side_ = 0;
  std::vector<double> values_;
};

struct Detection {
  /// Throws std::invalid_argument if score is outside [0, 1].
  Detection(Polygon polygon, double score);

  Polygon polygon;
  double score;
};

inline constexpr double kDefaultIouResolution = 4.0;
inline constexpr int kMaxIouGridSide = 2048;
inline constexpr double kDefaultNmsThreshold = 0.5;
inline constexpr double kDefaultMaskThreshold = 0.5;

/// Absolute shoelace area.
double polygon_area(const Polygon& polygon);
double signed_area(std::span<const Point> vertices);

/// Pixel-center containment with the even-odd rule.
BitMask rasterize(const Polygon& polygon, int width, int height);
inline BitMask rasterize(const Polygon& polygon, Size size) {
  return rasterize(polygon, size.width, size.height);
}

/// Even-odd membership of one point; the reference rule rasterize() follows.
bool contains(const Polygon& polygon, Point p);

/// IoU of two polygons rasterized on a shared grid over their joint bounding
/// box with `resolution` samples per pixel (each axis capped at
/// kMaxIouGridSide cells). Returns 0 when the joint box has no extent.
double polygon_iou(const Polygon& a, const Polygon& b,
                   double resolution = kDefaultIouResolution);

/// Exact closed-form IoU. Zero-area boxes give 0, identical ones included.
double box_iou(const AABox& a, const AABox& b);

Polygon box_polygon(const AABox& box);

/// Sutherland-Hodgman clip against an axis-aligned box; nullopt when nothing
/// with positive area is left.
std::optional<Polygon> clip_polygon(const Polygon& polygon, const AABox& box);

/// Rotation of a whole canvas by `angle_degrees` counter-clockwise as seen on
/// screen (y axis pointing down). The output canvas is the integer extent of
/// the rotated canvas; content is rotated about the old center and re-centered
/// on the new canvas so that every rotated point has non-negative coordinates.
class CanvasRotation {
 public:
  CanvasRotation(double angle_degrees, Size old_size);

  double angle_degrees() const { return angle_degrees_; }
  Size old_size() const { return old_size_; }
  Size new_size() const { return new_size_; }

  Point Apply(Point p) const;
  Point Invert(Point p) const;
  Polygon Apply(const Polygon& polygon) const;
  Polygon Invert(const Polygon& polygon) const;

 private:
  double angle_degrees_;
  Size old_size_;
  Size new_size_;
  double cos_;
  double sin_;
};

std::pair<Polygon, Size> rotate_polygon(const Polygon& polygon,
                                        double angle_degrees, Size old_size);

/// 8-connected components ordered by decreasing pixel count, ties broken by
/// the smaller row-major index of the first pixel.
std::vector<BitMask> connected_components(const BitMask& mask);

/// Outer boundary of the largest connected component as a marching-squares
/// contour at the 0.5 iso-level. Throws std::invalid_argument("no foreground")
/// for an empty mask.
Polygon mask_to_polygon(const BitMask& mask);

/// Greedy polygonal NMS; returns kept indices in ascending order.
std::vector<std::size_t> polygon_nms(std::span<const Detection> detections,
                                     double iou_threshold = kDefaultNmsThreshold,
                                     double resolution = kDefaultIouResolution);

/// Bilinearly resamples `grid` over `box` onto a canvas of `image_size` and
/// keeps pixels whose value is >= threshold.
BitMask paste_mask(const MaskGrid& grid, const AABox& box, Size image_size,
                   double threshold = kDefaultMaskThreshold);

}  // namespace mayor

#endif  // MAYOR_GEOMETRY_H_
