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

// Marching-squares boundary extraction for binary masks.
//
// Sample points are pixel centers. Contour vertices sit halfway between an
// inside and an outside center, so in doubled integer coordinates every vertex
// is exact: pixel (i, j) has its center at (2i + 1, 2j + 1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mayor/geometry.h"

namespace mayor {
namespace {

struct Key {
  long x2;
  long y2;
};

std::int64_t Pack(Key k) {
  return (static_cast<std::int64_t>(k.x2 + 4) << 32) | static_cast<std::int64_t>(k.y2 + 4);
}

Key Unpack(std::int64_t v) {
  return {static_cast<long>(v >> 32) - 4, static_cast<long>(v & 0xffffffff) - 4};
}

// Foreground of `component` plus every background pixel that is not
// 4-connected to the outside (i.e. holes).
BitMask FillHoles(const BitMask& component) {
  const int w = component.width(), h = component.height();
  const int pw = w + 2, ph = h + 2;
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(pw) * ph, 0);
  auto fg = [&](int x, int y) {
    return x >= 1 && y >= 1 && x <= w && y <= h && component.get(x - 1, y - 1);
  };
  std::deque<std::pair<int, int>> queue;
  outside[0] = 1;
  queue.emplace_back(0, 0);
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    constexpr int kDx[] = {1, -1, 0, 0};
    constexpr int kDy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k], ny = y + kDy[k];
      if (nx < 0 || ny < 0 || nx >= pw || ny >= ph) continue;
      const std::size_t idx = static_cast<std::size_t>(ny) * pw + nx;
      if (outside[idx] || fg(nx, ny)) continue;
      outside[idx] = 1;
      queue.emplace_back(nx, ny);
    }
  }
  BitMask filled(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      filled.set(x, y, !outside[static_cast<std::size_t>(y + 1) * pw + (x + 1)]);
    }
  }
  return filled;
}

}  // namespace

Polygon mask_to_polygon(const BitMask& mask) {
  const std::vector<BitMask> components = connected_components(mask);
  if (components.empty()) throw std::invalid_argument("no foreground");
  const BitMask region = FillHoles(components.front());
  const int w = region.width(), h = region.height();
  auto inside = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && region.get(x, y);
  };

  // Directed segments keyed by start vertex; the inside is kept on the same
  // side for every cell, so segments chain into closed loops.
  std::unordered_map<std::int64_t, std::int64_t> next;
  for (int j = -1; j < h; ++j) {
    for (int i = -1; i < w; ++i) {
      // Corners clockwise on screen: tl, tr, br, bl.
      const bool c[4] = {inside(i, j), inside(i + 1, j), inside(i + 1, j + 1),
                         inside(i, j + 1)};
      if (c[0] == c[1] && c[1] == c[2] && c[2] == c[3]) continue;
      // Midpoint of edge k, which runs from corner k to corner k + 1.
      const Key mid[4] = {{2L * i + 2, 2L * j + 1},
                          {2L * i + 3, 2L * j + 2},
                          {2L * i + 2, 2L * j + 3},
                          {2L * i + 1, 2L * j + 2}};
      // Pair each in->out crossing with the next out->in crossing clockwise.
      // In saddle cells this joins the two inside corners, matching
      // 8-connectivity.
      for (int k = 0; k < 4; ++k) {
        if (!(c[k] && !c[(k + 1) % 4])) continue;
        for (int step = 1; step < 4; ++step) {
          const int e = (k + step) % 4;
          if (!c[e] && c[(e + 1) % 4]) {
            next[Pack(mid[e])] = Pack(mid[k]);
            break;
          }
        }
      }
    }
  }

  std::vector<Key> best;
  double best_area = -1.0;
  std::vector<std::int64_t> starts;
  starts.reserve(next.size());
  for (const auto& entry : next) starts.push_back(entry.first);
  std::sort(starts.begin(), starts.end());
  std::unordered_map<std::int64_t, bool> visited;
  visited.reserve(next.size());
  for (const std::int64_t start : starts) {
    if (visited[start]) continue;
    std::vector<Key> loop;
    std::int64_t cur = start;
    while (!visited[cur]) {
      visited[cur] = true;
      loop.push_back(Unpack(cur));
      const auto it = next.find(cur);
      if (it == next.end()) break;
      cur = it->second;
    }
    double twice = 0.0;
    for (std::size_t a = 0, b = loop.size() - 1; a < loop.size(); b = a++) {
      twice += static_cast<double>(loop[b].x2) * static_cast<double>(loop[a].y2) -
               static_cast<double>(loop[a].x2) * static_cast<double>(loop[b].y2);
    }
    if (std::abs(twice) > best_area) {
      best_area = std::abs(twice);
      best = std::move(loop);
    }
  }

  // Drop collinear vertices.
  std::vector<Key> simple;
  const std::size_t n = best.size();
  for (std::size_t a = 0; a < n; ++a) {
    const Key& p = best[(a + n - 1) % n];
    const Key& q = best[a];
    const Key& r = best[(a + 1) % n];
    const long cross = (q.x2 - p.x2) * (r.y2 - q.y2) - (q.y2 - p.y2) * (r.x2 - q.x2);
    if (cross != 0) simple.push_back(q);
  }
  std::vector<Point> pts;
  pts.reserve(simple.size());
  for (const Key& k : simple) pts.emplace_back(0.5 * k.x2, 0.5 * k.y2);
  return Polygon(std::move(pts));
}

}  // namespace mayor
