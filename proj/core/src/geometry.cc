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

#include "mayor/geometry.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "scanline.h"

namespace mayor {

Point::Point(double x, double y) : x_(x), y_(y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("Point: coordinates must be finite");
  }
}

AABox::AABox(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_max)) {
    throw std::invalid_argument("AABox: coordinates must be finite");
  }
  if (x_min > x_max || y_min > y_max) {
    throw std::invalid_argument("AABox: min corner exceeds max corner");
  }
}

AABox AABox::FromCenter(double cx, double cy, double w, double h) {
  return AABox(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

double signed_area(std::span<const Point> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += vertices[j].x() * vertices[i].y() - vertices[i].x() * vertices[j].y();
  }
  return 0.5 * twice;
}

Polygon::Polygon(std::vector<Point> vertices) {
  vertices_.reserve(vertices.size());
  for (const Point& p : vertices) {
    if (vertices_.empty() || !(vertices_.back() == p)) vertices_.push_back(p);
  }
  while (vertices_.size() > 1 && vertices_.front() == vertices_.back()) {
    vertices_.pop_back();
  }
  if (vertices_.size() < 3) {
    throw std::invalid_argument("Polygon: needs at least 3 distinct vertices");
  }
  const double area = signed_area(vertices_);
  if (area == 0.0 || !std::isfinite(area)) {
    throw std::invalid_argument("Polygon: zero signed area");
  }
  if (area < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

AABox Polygon::bounds() const {
  double x0 = vertices_[0].x(), x1 = x0, y0 = vertices_[0].y(), y1 = y0;
  for (const Point& p : vertices_) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  return AABox(x0, y0, x1, y1);
}

BitMask::BitMask(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw std::invalid_argument("BitMask: negative dimensions");
  }
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BitMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

MaskGrid::MaskGrid(int side, double fill) : side_(side) {
  if (side < 1) throw std::invalid_argument("MaskGrid: side must be >= 1");
  values_.assign(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), fill);
}

MaskGrid::MaskGrid(int side, std::vector<double> values)
    : side_(side), values_(std::move(values)) {
  if (side < 1 ||
      values_.size() != static_cast<std::size_t>(side) * static_cast<std::size_t>(side)) {
    throw std::invalid_argument("MaskGrid: value count does not match side");
  }
}

Detection::Detection(Polygon p, double s) : polygon(std::move(p)), score(s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("Detection: score must lie in [0, 1]");
  }
}

double polygon_area(const Polygon& polygon) {
  return std::abs(signed_area(polygon.vertices()));
}

bool contains(const Polygon& polygon, Point p) {
  const auto v = polygon.vertices();
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const double xi = v[i].x(), yi = v[i].y(), xj = v[j].x(), yj = v[j].y();
    if ((yi > p.y()) != (yj > p.y()) &&
        p.x() < (xj - xi) * (p.y() - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

BitMask rasterize(const Polygon& polygon, int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("rasterize: canvas must be at least 1x1");
  }
  BitMask mask(width, height);
  internal::ForEachSpan(polygon.vertices(), width, height,
                        [&](int row, int begin, int end) {
                          for (int x = begin; x < end; ++x) mask.set(x, row);
                        });
  return mask;
}

double polygon_iou(const Polygon& a, const Polygon& b, double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("polygon_iou: resolution must be positive");
  }
  const AABox ba = a.bounds();
  const AABox bb = b.bounds();
  const double x0 = std::min(ba.x_min(), bb.x_min());
  const double y0 = std::min(ba.y_min(), bb.y_min());
  const double ex = std::max(ba.x_max(), bb.x_max()) - x0;
  const double ey = std::max(ba.y_max(), bb.y_max()) - y0;
  if (!(ex > 0.0) || !(ey > 0.0)) return 0.0;

  const int cols = static_cast<int>(
      std::clamp(std::ceil(ex * resolution), 1.0, static_cast<double>(kMaxIouGridSide)));
  const int rows = static_cast<int>(
      std::clamp(std::ceil(ey * resolution), 1.0, static_cast<double>(kMaxIouGridSide)));
  const double sx = cols / ex;
  const double sy = rows / ey;

  auto to_grid = [&](const Polygon& p) {
    std::vector<Point> out;
    out.reserve(p.size());
    for (const Point& v : p.vertices()) {
      out.emplace_back((v.x() - x0) * sx, (v.y() - y0) * sy);
    }
    return out;
  };
  const std::vector<Point> ga = to_grid(a);
  const std::vector<Point> gb = to_grid(b);

  std::vector<std::vector<std::pair<int, int>>> spans_a(static_cast<std::size_t>(rows));
  std::vector<std::vector<std::pair<int, int>>> spans_b(static_cast<std::size_t>(rows));
  std::size_t count_a = 0, count_b = 0;
  internal::ForEachSpan(ga, cols, rows, [&](int row, int begin, int end) {
    spans_a[static_cast<std::size_t>(row)].emplace_back(begin, end);
    count_a += static_cast<std::size_t>(end - begin);
  });
  internal::ForEachSpan(gb, cols, rows, [&](int row, int begin, int end) {
    spans_b[static_cast<std::size_t>(row)].emplace_back(begin, end);
    count_b += static_cast<std::size_t>(end - begin);
  });

  std::size_t inter = 0;
  for (std::size_t r = 0; r < spans_a.size(); ++r) {
    const auto& sa = spans_a[r];
    const auto& sb = spans_b[r];
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
      const int lo = std::max(sa[i].first, sb[j].first);
      const int hi = std::min(sa[i].second, sb[j].second);
      if (hi > lo) inter += static_cast<std::size_t>(hi - lo);
      if (sa[i].second < sb[j].second) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  const std::size_t uni = count_a + count_b - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double box_iou(const AABox& a, const AABox& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  const double iw = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double ih = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (area_a + area_b - inter);
}

Polygon box_polygon(const AABox& box) {
  return Polygon({Point(box.x_min(), box.y_min()), Point(box.x_max(), box.y_min()),
                  Point(box.x_max(), box.y_max()), Point(box.x_min(), box.y_max())});
}

std::optional<Polygon> clip_polygon(const Polygon& polygon, const AABox& box) {
  std::vector<Point> pts(polygon.vertices().begin(), polygon.vertices().end());
  // Keeps the side where sign * (coord - bound) >= 0; crossings are snapped
  // onto the edge.
  const auto clip = [&pts](bool x_axis, double bound, double sign) {
    const auto value = [&](const Point& p) { return sign * ((x_axis ? p.x() : p.y()) - bound); };
    std::vector<Point> out;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& cur = pts[i];
      const Point& next = pts[(i + 1) % n];
      const double vc = value(cur);
      const double vn = value(next);
      if (vc >= 0.0) out.push_back(cur);
      if ((vc >= 0.0) != (vn >= 0.0)) {
        const double t = vc / (vc - vn);
        if (x_axis) {
          out.emplace_back(bound, cur.y() + t * (next.y() - cur.y()));
        } else {
          out.emplace_back(cur.x() + t * (next.x() - cur.x()), bound);
        }
      }
    }
    pts = std::move(out);
  };
  clip(true, box.x_min(), 1.0);
  clip(true, box.x_max(), -1.0);
  clip(false, box.y_min(), 1.0);
  clip(false, box.y_max(), -1.0);
  if (pts.size() < 3) return std::nullopt;
  try {
    Polygon clipped(std::move(pts));
    if (polygon_area(clipped) < 1e-9) return std::nullopt;
    return clipped;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

CanvasRotation::CanvasRotation(double angle_degrees, Size old_size)
    : angle_degrees_(angle_degrees), old_size_(old_size) {
  if (!std::isfinite(angle_degrees)) {
    throw std::invalid_argument("CanvasRotation: angle must be finite");
  }
  if (old_size.width < 1 || old_size.height < 1) {
    throw std::invalid_argument("CanvasRotation: canvas must be at least 1x1");
  }
  double a = std::fmod(angle_degrees, 360.0);
  if (a < 0.0) a += 360.0;
  // Quarter turns are snapped so they map integer canvases exactly.
  if (a == 0.0) {
    cos_ = 1.0;
    sin_ = 0.0;
  } else if (a == 90.0) {
    cos_ = 0.0;
    sin_ = 1.0;
  } else if (a == 180.0) {
    cos_ = -1.0;
    sin_ = 0.0;
  } else if (a == 270.0) {
    cos_ = 0.0;
    sin_ = -1.0;
  } else {
    const double rad = a * std::acos(-1.0) / 180.0;
    cos_ = std::cos(rad);
    sin_ = std::sin(rad);
  }
  const double w = old_size.width, h = old_size.height;
  const double exact_w = std::abs(cos_) * w + std::abs(sin_) * h;
  const double exact_h = std::abs(sin_) * w + std::abs(cos_) * h;
  new_size_.width = std::max(1, static_cast<int>(std::ceil(exact_w - 1e-6)));
  new_size_.height = std::max(1, static_cast<int>(std::ceil(exact_h - 1e-6)));
}

Point CanvasRotation::Apply(Point p) const {
  if (cos_ == 1.0) return p;
  const double dx = p.x() - 0.5 * old_size_.width;
  const double dy = p.y() - 0.5 * old_size_.height;
  return Point(0.5 * new_size_.width + dx * cos_ + dy * sin_,
               0.5 * new_size_.height - dx * sin_ + dy * cos_);
}

Point CanvasRotation::Invert(Point p) const {
  if (cos_ == 1.0) return p;
  const double dx = p.x() - 0.5 * new_size_.width;
  const double dy = p.y() - 0.5 * new_size_.height;
  return Point(0.5 * old_size_.width + dx * cos_ - dy * sin_,
               0.5 * old_size_.height + dx * sin_ + dy * cos_);
}

Polygon CanvasRotation::Apply(const Polygon& polygon) const {
  std::vector<Point> out;
  out.reserve(polygon.size());
  for (const Point& v : polygon.vertices()) out.push_back(Apply(v));
  return Polygon(std::move(out));
}

Polygon CanvasRotation::Invert(const Polygon& polygon) const {
  std::vector<Point> out;
  out.reserve(polygon.size());
  for (const Point& v : polygon.vertices()) out.push_back(Invert(v));
  return Polygon(std::move(out));
}

std::pair<Polygon, Size> rotate_polygon(const Polygon& polygon, double angle_degrees,
                                        Size old_size) {
  const CanvasRotation rotation(angle_degrees, old_size);
  return {rotation.Apply(polygon), rotation.new_size()};
}

std::vector<BitMask> connected_components(const BitMask& mask) {
  const int w = mask.width(), h = mask.height();
  std::vector<int> label(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  std::vector<std::vector<std::size_t>> members;
  std::deque<std::size_t> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!mask.get(x, y) || label[idx] >= 0) continue;
      const int id = static_cast<int>(members.size());
      members.emplace_back();
      label[idx] = id;
      queue.push_back(idx);
      while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        members[static_cast<std::size_t>(id)].push_back(cur);
        const int cx = static_cast<int>(cur % w), cy = static_cast<int>(cur / w);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (mask.get(nx, ny) && label[nidx] < 0) {
              label[nidx] = id;
              queue.push_back(nidx);
            }
          }
        }
      }
    }
  }
  // Components were discovered in row-major order of their first pixel, so a
  // stable sort by size keeps that order among ties.
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return members[a].size() > members[b].size();
  });
  std::vector<BitMask> out;
  out.reserve(order.size());
  for (std::size_t id : order) {
    BitMask comp(w, h);
    for (std::size_t idx : members[id]) comp.bits()[idx] = 1;
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<std::size_t> polygon_nms(std::span<const Detection> detections,
                                     double iou_threshold, double resolution) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  for (const Detection& d : detections) {
    if (!std::isfinite(d.score)) {
      throw std::invalid_argument("polygon_nms: scores must be finite");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool keep = true;
    for (std::size_t k : kept) {
      if (polygon_iou(detections[idx].polygon, detections[k].polygon, resolution) >=
          iou_threshold) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

BitMask paste_mask(const MaskGrid& grid, const AABox& box, Size image_size,
                   double threshold) {
  BitMask out(image_size.width, image_size.height);
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) return out;
  const int n = grid.side();
  const int x_begin = std::max(0, static_cast<int>(std::ceil(box.x_min() - 0.5)));
  const int y_begin = std::max(0, static_cast<int>(std::ceil(box.y_min() - 0.5)));
  const int x_end =
      std::min(image_size.width, static_cast<int>(std::ceil(box.x_max() - 0.5)));
  const int y_end =
      std::min(image_size.height, static_cast<int>(std::ceil(box.y_max() - 0.5)));
  const auto sample_coord = [n](double c, double lo, double extent) {
    const double u = (c - lo) / extent * n - 0.5;
    return std::clamp(u, 0.0, static_cast<double>(n - 1));
  };
  for (int py = y_begin; py < y_end; ++py) {
    const double cy = py + 0.5;
    if (cy < box.y_min() || cy >= box.y_max()) continue;
    const double v = sample_coord(cy, box.y_min(), box.height());
    const int r0 = static_cast<int>(std::floor(v));
    const int r1 = std::min(r0 + 1, n - 1);
    const double fv = v - r0;
    for (int px = x_begin; px < x_end; ++px) {
      const double cx = px + 0.5;
      if (cx < box.x_min() || cx >= box.x_max()) continue;
      const double u = sample_coord(cx, box.x_min(), box.width());
      const int c0 = static_cast<int>(std::floor(u));
      const int c1 = std::min(c0 + 1, n - 1);
      const double fu = u - c0;
      const double value = (1.0 - fv) * ((1.0 - fu) * grid.at(r0, c0) + fu * grid.at(r0, c1)) +
                           fv * ((1.0 - fu) * grid.at(r1, c0) + fu * grid.at(r1, c1));
      if (value >= threshold) out.set(px, py);
    }
  }
  return out;
}

}  // namespace mayor
