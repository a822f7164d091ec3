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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mayor/data.h"
#include "mayor/geometry.h"
#include "oracles.h"

namespace mayor {
namespace {

namespace fs = std::filesystem;

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mayor_data_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("parse_annotation_line") {
  const TextInstance a = parse_annotation_line("0,0,10,0,10,5,0,5");
  CHECK(a.polygon.size() == 4);
  CHECK_FALSE(a.ignore);
  CHECK(polygon_area(a.polygon) == 50.0);
  CHECK(parse_annotation_line("0,0,10,0,10,5,0,5,###").ignore);
  CHECK(parse_annotation_line(" 1.5, 2.25 ,7,2.25,7,9 ").polygon.size() == 3);
  CHECK_THROWS_AS(parse_annotation_line("0,0,10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_annotation_line("0,0,10,x,4,4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_annotation_line("0,0,10,0"), std::invalid_argument);
}

TEST_CASE("format_annotation_line round trip") {
  const TextInstance t{Polygon({Point(0.1234567, 2), Point(10, 0), Point(10, 5.5)}), true};
  const TextInstance back = parse_annotation_line(format_annotation_line(t));
  CHECK(back.ignore);
  REQUIRE(back.polygon.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(back.polygon.vertices()[i].x() - t.polygon.vertices()[i].x()) <= 1e-6);
    CHECK(std::abs(back.polygon.vertices()[i].y() - t.polygon.vertices()[i].y()) <= 1e-6);
  }
}

TEST_CASE("load_annotations") {
  const fs::path dir = FreshDir("load");
  WriteFile(dir / "gt_b.txt", "0,0,10,0,10,5,0,5\n\n2,2,6,2,6,4,2,4,###\n");
  WriteFile(dir / "gt_a.txt", "");
  WriteFile(dir / "notes.txt", "ignored");
  const auto records = load_annotations(dir);
  REQUIRE(records.size() == 2);
  CHECK(records[0].id == "a");
  CHECK(records[0].instances.empty());
  CHECK(records[1].id == "b");
  REQUIRE(records[1].instances.size() == 2);
  CHECK_FALSE(records[1].instances[0].ignore);
  CHECK(records[1].instances[1].ignore);
  CHECK(records[1].size == Size{10, 5});
  CHECK_FALSE(records[1].pixels);

  WriteFile(dir / "gt_c.txt", "0,0,1,0,1,1\n0,0,10\n");
  try {
    load_annotations(dir);
    FAIL("expected AnnotationError");
  } catch (const AnnotationError& e) {
    const std::string what = e.what();
    CHECK(what.find("gt_c.txt:2") != std::string::npos);
    CHECK(what.find("odd coordinate count") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("pgm round trip") {
  const fs::path dir = FreshDir("pgm");
  GrayImage img(5, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 5; ++x) img.at(x, y) = (x + 5 * y) / 14.0;
  }
  write_pgm(img, dir / "i.pgm");
  const GrayImage back = read_pgm(dir / "i.pgm");
  REQUIRE(back.size() == Size{5, 3});
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 5; ++x) CHECK(std::abs(back.at(x, y) - img.at(x, y)) <= 0.5 / 255.0 + 1e-12);
  }
  CHECK(ReadFile(dir / "i.pgm").rfind("P5\n5 3\n255\n", 0) == 0);
  WriteFile(dir / "bad.pgm", "P2\n1 1\n255\n0\n");
  CHECK_THROWS(read_pgm(dir / "bad.pgm"));
  fs::remove_all(dir);
}

TEST_CASE("save then load preserves the dataset") {
  SynthConfig cfg;
  cfg.seed = 5;
  const auto ds = gen_dense_dataset(cfg, 3, "s");
  const fs::path dir = FreshDir("roundtrip");
  save_annotations(ds, dir);
  const auto back = load_annotations(dir);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back[i].id == ds[i].id);
    CHECK(back[i].size == ds[i].size);
    REQUIRE(back[i].instances.size() == ds[i].instances.size());
    for (std::size_t k = 0; k < ds[i].instances.size(); ++k) {
      const auto a = ds[i].instances[k].polygon.vertices();
      const auto b = back[i].instances[k].polygon.vertices();
      REQUIRE(a.size() == b.size());
      for (std::size_t v = 0; v < a.size(); ++v) {
        CHECK(std::abs(a[v].x() - b[v].x()) <= 1e-6);
        CHECK(std::abs(a[v].y() - b[v].y()) <= 1e-6);
      }
    }
  }
  // Re-serializing is byte-stable.
  const fs::path again = FreshDir("roundtrip2");
  save_annotations(back, again);
  for (const auto& r : ds) {
    CHECK(ReadFile(dir / ("gt_" + r.id + ".txt")) == ReadFile(again / ("gt_" + r.id + ".txt")));
    CHECK(ReadFile(dir / (r.id + ".pgm")) == ReadFile(again / (r.id + ".pgm")));
  }
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("synth config validation") {
  SynthConfig cfg;
  cfg.gap = {0.5, 2.0};
  CHECK_THROWS_AS(cfg.Validate(), std::invalid_argument);
  cfg = {};
  cfg.thickness = {1.0, 3.0};
  CHECK_THROWS_AS(cfg.Validate(), std::invalid_argument);
  cfg = {};
  cfg.length = {50.0, 40.0};
  CHECK_THROWS_AS(cfg.Validate(), std::invalid_argument);
  cfg = {};
  cfg.length = {500.0, 600.0};
  CHECK_THROWS_AS(gen_dense_scene(cfg), std::invalid_argument);
}

TEST_CASE("single stripe renders exactly its rasterization") {
  SynthConfig cfg;
  cfg.stripe_count = {1, 1};
  cfg.thickness = {4.0, 4.0};
  cfg.orientation = {0.0, 0.0};
  cfg.length = {60.0, 60.0};
  cfg.placement_jitter = 0.0;
  cfg.noise = 0.0;
  cfg.foreground = {0.9, 0.9};
  cfg.background = {0.1, 0.1};
  const ImageRecord r = gen_dense_scene(cfg);
  REQUIRE(r.instances.size() == 1);
  CHECK(r.instances[0].polygon.bounds() == AABox(34, 62, 94, 66));
  const BitMask m = rasterize(r.instances[0].polygon, r.size);
  for (int y = 0; y < r.size.height; ++y) {
    for (int x = 0; x < r.size.width; ++x) {
      CHECK(r.pixels->at(x, y) == (m.get(x, y) ? 0.9 : 0.1));
    }
  }
}

TEST_CASE("dense scenes") {
  SynthConfig cfg;
  cfg.orientation = {-60.0, 60.0};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    cfg.seed = seed;
    const ImageRecord r = gen_dense_scene(cfg);
    CHECK(r == gen_dense_scene(cfg));
    REQUIRE(r.instances.size() >= 1);
    CHECK(r.instances.size() <= 6);
    for (const auto& inst : r.instances) {
      const AABox b = inst.polygon.bounds();
      CHECK(b.x_min() >= 0.0);
      CHECK(b.y_min() >= 0.0);
      CHECK(b.x_max() <= r.size.width);
      CHECK(b.y_max() <= r.size.height);
      CHECK(inst.polygon.size() == 4);
    }
    for (std::size_t i = 0; i < r.instances.size(); ++i) {
      for (std::size_t j = i + 1; j < r.instances.size(); ++j) {
        CHECK(polygon_iou(r.instances[i].polygon, r.instances[j].polygon) == 0.0);
      }
      // Top-to-bottom order along the downward normal of the stripes.
      if (i + 1 < r.instances.size()) {
        const auto v = r.instances[i].polygon.vertices();
        double ex = v[1].x() - v[0].x(), ey = v[1].y() - v[0].y();
        if (std::hypot(ex, ey) < std::hypot(v[2].x() - v[1].x(), v[2].y() - v[1].y())) {
          ex = v[2].x() - v[1].x();
          ey = v[2].y() - v[1].y();
        }
        double nx = -ey, ny = ex;
        if (ny < 0.0) {
          nx = -nx;
          ny = -ny;
        }
        auto depth = [&](const Polygon& p) {
          double s = 0.0;
          for (const Point& q : p.vertices()) s += q.x() * nx + q.y() * ny;
          return s;
        };
        CHECK(depth(r.instances[i].polygon) < depth(r.instances[i + 1].polygon));
      }
    }
    for (double v : r.pixels->pixels()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("tight stripes put neighbours inside a dilated box") {
  SynthConfig cfg;
  cfg.stripe_count = {5, 5};
  cfg.gap = {2.0, 2.0};
  cfg.thickness = {6.0, 6.0};
  cfg.orientation = {-30.0, 30.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const ImageRecord r = gen_dense_scene(cfg);
    REQUIRE(r.instances.size() >= 2);
    std::vector<BitMask> masks;
    for (const auto& inst : r.instances) masks.push_back(rasterize(inst.polygon, r.size));
    for (const auto& inst : r.instances) {
      const AABox b = inst.polygon.bounds();
      int hit = 0;
      for (const BitMask& m : masks) {
        bool any = false;
        for (int y = std::max(0, static_cast<int>(b.y_min() - 6));
             y < std::min(r.size.height, static_cast<int>(b.y_max() + 6)); ++y) {
          for (int x = std::max(0, static_cast<int>(b.x_min() - 6));
               x < std::min(r.size.width, static_cast<int>(b.x_max() + 6)); ++x) {
            any |= m.get(x, y);
          }
        }
        hit += any ? 1 : 0;
      }
      CHECK(hit >= 2);
    }
  }
}

TEST_CASE("gen_dense_dataset is independent of the job count") {
  SynthConfig cfg;
  cfg.seed = 17;
  const auto serial = gen_dense_dataset(cfg, 8, "x", 1);
  CHECK(serial == gen_dense_dataset(cfg, 8, "x", 3));
  CHECK(serial[0].id == "x0000");
  CHECK(serial[1] != serial[0]);
}

TEST_CASE("rotate_dataset") {
  SynthConfig cfg;
  cfg.seed = 2;
  cfg.canvas = {100, 80};
  const auto ds = gen_dense_dataset(cfg, 2, "r");
  const auto same = rotate_dataset(ds, 0.0);
  CHECK(same == ds);

  const auto quarter = rotate_dataset(ds, 90.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(quarter[i].size == Size{80, 100});
    REQUIRE(quarter[i].instances.size() == ds[i].instances.size());
    for (std::size_t k = 0; k < ds[i].instances.size(); ++k) {
      CHECK(polygon_area(quarter[i].instances[k].polygon) ==
            doctest::Approx(polygon_area(ds[i].instances[k].polygon)).epsilon(1e-6));
    }
    // A quarter turn moves pixels without resampling.
    for (int y = 0; y < 80; ++y) {
      for (int x = 0; x < 100; ++x) {
        CHECK(quarter[i].pixels->at(y, 99 - x) == doctest::Approx(ds[i].pixels->at(x, y)));
      }
    }
  }

  SynthConfig sq;
  sq.seed = 3;
  const auto square = rotate_dataset(gen_dense_dataset(sq, 1, "q"), 45.0);
  CHECK(std::abs(square[0].size.width - std::round(128 * std::sqrt(2.0))) <= 1);
  for (std::size_t i = 0; i < square[0].instances.size(); ++i) {
    for (std::size_t j = i + 1; j < square[0].instances.size(); ++j) {
      CHECK(polygon_iou(square[0].instances[i].polygon, square[0].instances[j].polygon) == 0.0);
    }
  }
  CHECK(rotate_dataset(ds, 30.0, 1) == rotate_dataset(ds, 30.0, 2));
}

TEST_CASE("jitter_proposals") {
  const std::vector<AABox> gts{AABox(0, 0, 10, 10), AABox(20, 20, 40, 30)};
  const auto same = jitter_proposals(gts, {64, 64}, {0.0, 0.0, 1, 7});
  REQUIRE(same.size() == 2);
  CHECK(same[0].box == gts[0]);
  CHECK(same[1].box == gts[1]);

  const auto three = jitter_proposals(gts, {64, 64}, {0.2, 0.1, 3, 7});
  REQUIRE(three.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(three[i].gt_index == i / 3);
  CHECK(three == jitter_proposals(gts, {64, 64}, {0.2, 0.1, 3, 7}));

  const std::vector<AABox> one{AABox(0, 0, 10, 10)};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = jitter_proposals(one, {100, 100}, {0.0, 0.1, 1, seed});
    // Unclipped only when the shift keeps the box inside the canvas.
    if (p[0].box.x_min() > 0.0 && p[0].box.y_min() > 0.0) {
      CHECK(p[0].box.center_x() >= 4.0);
      CHECK(p[0].box.center_x() <= 6.0);
      CHECK(p[0].box.center_y() >= 4.0);
      CHECK(p[0].box.center_y() <= 6.0);
    }
    CHECK(p[0].box.x_min() >= 0.0);
  }
  CHECK_THROWS_AS(jitter_proposals(one, {10, 10}, {-0.1, 0.0, 1, 0}), std::invalid_argument);
}

}  // namespace
}  // namespace mayor
