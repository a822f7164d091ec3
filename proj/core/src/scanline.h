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

#ifndef MAYOR_SRC_SCANLINE_H_
#define MAYOR_SRC_SCANLINE_H_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mayor/geometry.h"

namespace mayor::internal {

// Calls fn(row, begin, end) for every maximal run of pixels [begin, end) in
// `row` whose centers are inside the polygon under the even-odd rule. The
// crossing arithmetic is kept identical to contains() so both agree bit for bit.
template <typename Fn>
void ForEachSpan(std::span<const Point> v, int width, int height, Fn&& fn) {
  const std::size_t n = v.size();
  double y_lo = v[0].y(), y_hi = v[0].y();
  for (const Point& p : v) {
    y_lo = std::min(y_lo, p.y());
    y_hi = std::max(y_hi, p.y());
  }
  y_lo = std::clamp(y_lo, -1.0, height + 1.0);
  y_hi = std::clamp(y_hi, -1.0, height + 1.0);
  const int row_begin = std::max(0, static_cast<int>(std::floor(y_lo - 0.5)));
  const int row_end = std::min(height, static_cast<int>(std::ceil(y_hi + 0.5)) + 1);
  std::vector<double> xs;
  xs.reserve(n);
  // First pixel index whose center is >= x.
  const double x_limit = width + 1.0;
  const auto first_at_or_after = [x_limit](double x) {
    x = std::clamp(x, -1.0, x_limit);
    long i = static_cast<long>(std::ceil(x - 0.5));
    while (i + 0.5 < x) ++i;
    while (i - 0.5 >= x) --i;
    return i;
  };
  for (int row = row_begin; row < row_end; ++row) {
    const double y = row + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const double xi = v[i].x(), yi = v[i].y(), xj = v[j].x(), yj = v[j].y();
      if ((yi > y) != (yj > y)) xs.push_back((xj - xi) * (y - yi) / (yj - yi) + xi);
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const long begin = std::max(0L, first_at_or_after(xs[k]));
      const long end = std::min(static_cast<long>(width), first_at_or_after(xs[k + 1]));
      if (end > begin) fn(row, static_cast<int>(begin), static_cast<int>(end));
    }
  }
}

}  // namespace mayor::internal

#endif  // MAYOR_SRC_SCANLINE_H_
