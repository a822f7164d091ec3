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

#include "mayor/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "mayor/parallel.h"
#include "mayor/random.h"

namespace mayor {
namespace {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  // UTF-8 byte order mark.
  if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
  return s;
}

void CheckRange(const Range& r, std::string_view name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw std::invalid_argument(fmt::format("SynthConfig: {} range is empty", name));
  }
}

// Interval [lo, hi] of along-line offsets `a` for which base + a * dir stays
// inside [margin, limit - margin] on one axis.
void IntersectAxis(double base, double dir, double margin, double limit, double& lo,
                   double& hi) {
  const double a = margin, b = limit - margin;
  if (std::abs(dir) < 1e-12) {
    if (base < a || base > b) {
      lo = 1.0;
      hi = 0.0;
    }
    return;
  }
  double t0 = (a - base) / dir, t1 = (b - base) / dir;
  if (t0 > t1) std::swap(t0, t1);
  lo = std::max(lo, t0);
  hi = std::min(hi, t1);
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("GrayImage: dimensions must be positive");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

double GrayImage::sample(double x, double y) const {
  const double ix = x - 0.5, iy = y - 0.5;
  const double fx0 = std::floor(ix), fy0 = std::floor(iy);
  if (fx0 < -1.0 || fy0 < -1.0 || fx0 > width_ || fy0 > height_) return 0.0;
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  const double fx = ix - fx0, fy = iy - fy0;
  const auto px = [&](int xx, int yy) {
    return (xx < 0 || yy < 0 || xx >= width_ || yy >= height_) ? 0.0 : at(xx, yy);
  };
  return (1.0 - fy) * ((1.0 - fx) * px(x0, y0) + fx * px(x0 + 1, y0)) +
         fy * ((1.0 - fx) * px(x0, y0 + 1) + fx * px(x0 + 1, y0 + 1));
}

void SynthConfig::Validate() const {
  if (canvas.width < 1 || canvas.height < 1) {
    throw std::invalid_argument("SynthConfig: canvas must be at least 1x1");
  }
  if (stripe_count.lo < 1 || stripe_count.lo > stripe_count.hi) {
    throw std::invalid_argument("SynthConfig: stripe count range is empty");
  }
  CheckRange(thickness, "thickness");
  CheckRange(gap, "gap");
  CheckRange(length, "length");
  CheckRange(orientation, "orientation");
  CheckRange(foreground, "foreground");
  CheckRange(background, "background");
  if (thickness.lo < 2.0) throw std::invalid_argument("SynthConfig: thickness below 2 pixels");
  if (gap.lo < 1.0) throw std::invalid_argument("SynthConfig: gap below 1 pixel");
  if (length.lo <= 0.0) throw std::invalid_argument("SynthConfig: length must be positive");
  if (!(noise >= 0.0 && noise <= 0.05)) {
    throw std::invalid_argument("SynthConfig: noise must lie in [0, 0.05]");
  }
  if (!(placement_jitter >= 0.0)) {
    throw std::invalid_argument("SynthConfig: placement jitter must be non-negative");
  }
}

TextInstance parse_annotation_line(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    tokens.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  bool ignore = false;
  if (!tokens.empty() && tokens.back() == kIgnoreToken) {
    ignore = true;
    tokens.pop_back();
  }
  if (tokens.size() % 2 != 0) {
    throw std::invalid_argument(
        fmt::format("odd coordinate count ({} values)", tokens.size()));
  }
  if (tokens.size() < 6) {
    throw std::invalid_argument("a polygon needs at least 3 vertices");
  }
  std::vector<double> values;
  values.reserve(tokens.size());
  for (std::string_view tok : tokens) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (tok.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
      throw std::invalid_argument(fmt::format("non-numeric token '{}'", tok));
    }
    values.push_back(v);
  }
  std::vector<Point> pts;
  pts.reserve(values.size() / 2);
  for (std::size_t i = 0; i < values.size(); i += 2) pts.emplace_back(values[i], values[i + 1]);
  return TextInstance{Polygon(std::move(pts)), ignore};
}

namespace {

std::string FormatNumber(double v) {
  std::string s = fmt::format("{:.6f}", v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

}  // namespace

std::string format_annotation_line(const TextInstance& instance) {
  std::string out;
  for (const Point& p : instance.polygon.vertices()) {
    if (!out.empty()) out += ',';
    out += FormatNumber(p.x());
    out += ',';
    out += FormatNumber(p.y());
  }
  if (instance.ignore) {
    out += ',';
    out += kIgnoreToken;
  }
  return out;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  const auto token = [&]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        continue;
      }
      tok += c;
    }
    return tok;
  };
  if (token() != "P5") {
    throw std::runtime_error(fmt::format("{}: not a binary PGM (P5)", path.string()));
  }
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw std::runtime_error(fmt::format("{}: malformed PGM header", path.string()));
  }
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
    throw std::runtime_error(fmt::format("{}: unsupported PGM dimensions", path.string()));
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error(fmt::format("{}: truncated PGM data", path.string()));
  }
  GrayImage image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      image.at(x, y) = raw[static_cast<std::size_t>(y) * w + x] / static_cast<double>(maxval);
    }
  }
  return image;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<unsigned char> raw(image.pixels().size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<unsigned char>(
        std::lround(std::clamp(image.pixels()[i], 0.0, 1.0) * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

std::vector<ImageRecord> load_annotations(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw std::runtime_error(fmt::format("{}: not a directory", root.string()));
  }
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 7 && name.rfind("gt_", 0) == 0 &&
        name.compare(name.size() - 4, 4, ".txt") == 0) {
      files.emplace(name.substr(3, name.size() - 7), entry.path());
    }
  }
  std::vector<ImageRecord> records;
  records.reserve(files.size());
  for (const auto& [id, path] : files) {
    std::ifstream in(path);
    if (!in) throw AnnotationError(fmt::format("{}: cannot open", path.string()));
    ImageRecord record;
    record.id = id;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string_view text = Trim(line);
      if (text.empty()) continue;
      try {
        record.instances.push_back(parse_annotation_line(text));
      } catch (const std::invalid_argument& e) {
        throw AnnotationError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
      }
    }
    const fs::path image_path = root / (id + ".pgm");
    if (fs::exists(image_path)) {
      record.pixels = read_pgm(image_path);
      record.size = record.pixels->size();
    } else {
      double max_x = 1.0, max_y = 1.0;
      for (const TextInstance& inst : record.instances) {
        const AABox b = inst.polygon.bounds();
        max_x = std::max(max_x, b.x_max());
        max_y = std::max(max_y, b.y_max());
      }
      record.size = {static_cast<int>(std::ceil(max_x)), static_cast<int>(std::ceil(max_y))};
    }
    const AABox canvas(0.0, 0.0, record.size.width, record.size.height);
    std::vector<TextInstance> clipped;
    clipped.reserve(record.instances.size());
    for (TextInstance& inst : record.instances) {
      if (auto poly = clip_polygon(inst.polygon, canvas)) {
        clipped.push_back(TextInstance{std::move(*poly), inst.ignore});
      }
    }
    record.instances = std::move(clipped);
    records.push_back(std::move(record));
  }
  return records;
}

void save_annotations(std::span<const ImageRecord> records, const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) {
    throw std::runtime_error(fmt::format("{}: cannot create directory: {}", root.string(),
                                         ec.message()));
  }
  for (const ImageRecord& record : records) {
    const fs::path path = root / ("gt_" + record.id + ".txt");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    for (const TextInstance& inst : record.instances) out << format_annotation_line(inst) << '\n';
    if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
    if (record.pixels) write_pgm(*record.pixels, root / (record.id + ".pgm"));
  }
}

ImageRecord gen_dense_scene(const SynthConfig& cfg, std::string id) {
  cfg.Validate();
  Rng rng(cfg.seed);
  const double w = cfg.canvas.width, h = cfg.canvas.height;
  const double theta = rng.uniform(cfg.orientation.lo, cfg.orientation.hi) *
                       std::acos(-1.0) / 180.0;
  // Text direction and the normal along which stripes are stacked; the normal
  // points down the screen so instance order is top to bottom.
  double ux = std::cos(theta), uy = -std::sin(theta);
  double nx = -uy, ny = ux;
  if (ny < 0.0 || (ny == 0.0 && nx < 0.0)) {
    nx = -nx;
    ny = -ny;
  }
  const int count = rng.uniform_int(cfg.stripe_count.lo, cfg.stripe_count.hi);
  std::vector<double> thick(static_cast<std::size_t>(count));
  std::vector<double> gaps(static_cast<std::size_t>(std::max(0, count - 1)));
  for (double& t : thick) t = rng.uniform(cfg.thickness.lo, cfg.thickness.hi);
  for (double& g : gaps) g = rng.uniform(cfg.gap.lo, cfg.gap.hi);
  double stack = 0.0;
  for (double t : thick) stack += t;
  for (double g : gaps) stack += g;

  const double short_side = std::min(w, h);
  const double normal_shift = rng.uniform(-1.0, 1.0) * cfg.placement_jitter * short_side;
  const double along_shift = rng.uniform(-1.0, 1.0) * cfg.placement_jitter * short_side;
  const double background = rng.uniform(cfg.background.lo, cfg.background.hi);

  constexpr double kMargin = 1.0;
  struct Stripe {
    Polygon polygon;
    double intensity;
  };
  std::vector<Stripe> stripes;
  double offset = -0.5 * stack + normal_shift;
  for (int k = 0; k < count; ++k) {
    const double t = thick[static_cast<std::size_t>(k)];
    const double center_offset = offset + 0.5 * t;
    offset += t + (k + 1 < count ? gaps[static_cast<std::size_t>(k)] : 0.0);
    const double desired = rng.uniform(cfg.length.lo, cfg.length.hi);
    const double along_jitter = rng.uniform(-1.0, 1.0) * cfg.placement_jitter * desired;
    const double intensity = rng.uniform(cfg.foreground.lo, cfg.foreground.hi);

    const double px = 0.5 * w + center_offset * nx + along_shift * ux;
    const double py = 0.5 * h + center_offset * ny + along_shift * uy;
    double lo = -1e18, hi = 1e18;
    for (double side : {-0.5 * t, 0.5 * t}) {
      IntersectAxis(px + side * nx, ux, kMargin, w, lo, hi);
      IntersectAxis(py + side * ny, uy, kMargin, h, lo, hi);
    }
    const double available = hi - lo;
    if (!(available >= cfg.length.lo)) continue;
    const double len = std::min(desired, available);
    const double a = std::clamp(along_jitter, lo + 0.5 * len, hi - 0.5 * len);
    const double a0 = a - 0.5 * len, a1 = a + 0.5 * len;
    const auto corner = [&](double along, double side) {
      return Point(px + along * ux + side * nx, py + along * uy + side * ny);
    };
    stripes.push_back(Stripe{Polygon({corner(a0, -0.5 * t), corner(a1, -0.5 * t),
                                      corner(a1, 0.5 * t), corner(a0, 0.5 * t)}),
                             intensity});
  }
  if (stripes.empty()) {
    throw std::invalid_argument("gen_dense_scene: configuration admits no placeable stripe");
  }

  ImageRecord record;
  record.id = std::move(id);
  record.size = cfg.canvas;
  GrayImage image(cfg.canvas.width, cfg.canvas.height, background);
  for (const Stripe& s : stripes) {
    const BitMask m = rasterize(s.polygon, cfg.canvas);
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        if (m.get(x, y)) image.at(x, y) = s.intensity;
      }
    }
    record.instances.push_back(TextInstance{s.polygon, false});
  }
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      image.at(x, y) = std::clamp(image.at(x, y) + rng.uniform(-cfg.noise, cfg.noise), 0.0, 1.0);
    }
  }
  record.pixels = std::move(image);
  return record;
}

std::vector<ImageRecord> gen_dense_dataset(const SynthConfig& cfg, int count,
                                           std::string_view prefix, int jobs) {
  cfg.Validate();
  std::vector<std::optional<ImageRecord>> slots(static_cast<std::size_t>(std::max(0, count)));
  parallel_for(slots.size(), jobs, [&](std::size_t i) {
    SynthConfig local = cfg;
    local.seed = derive_seed(cfg.seed, i);
    slots[i] = gen_dense_scene(local, fmt::format("{}{:04d}", prefix, i));
  });
  std::vector<ImageRecord> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

ImageRecord rotate_record(const ImageRecord& record, double angle_degrees) {
  const CanvasRotation rotation(angle_degrees, record.size);
  ImageRecord out;
  out.id = record.id;
  out.size = rotation.new_size();
  out.instances.reserve(record.instances.size());
  for (const TextInstance& inst : record.instances) {
    out.instances.push_back(TextInstance{rotation.Apply(inst.polygon), inst.ignore});
  }
  if (record.pixels) {
    GrayImage image(out.size.width, out.size.height, 0.0);
    for (int y = 0; y < out.size.height; ++y) {
      for (int x = 0; x < out.size.width; ++x) {
        const Point src = rotation.Invert(Point(x + 0.5, y + 0.5));
        image.at(x, y) = record.pixels->sample(src.x(), src.y());
      }
    }
    out.pixels = std::move(image);
  }
  return out;
}

std::vector<ImageRecord> rotate_dataset(std::span<const ImageRecord> dataset,
                                        double angle_degrees, int jobs) {
  std::vector<std::optional<ImageRecord>> slots(dataset.size());
  parallel_for(dataset.size(), jobs,
               [&](std::size_t i) { slots[i] = rotate_record(dataset[i], angle_degrees); });
  std::vector<ImageRecord> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<Proposal> jitter_proposals(std::span<const AABox> gts, Size canvas,
                                       const JitterConfig& cfg) {
  if (cfg.scale_noise < 0.0 || cfg.shift_noise < 0.0) {
    throw std::invalid_argument("jitter_proposals: noise must be non-negative");
  }
  Rng rng(cfg.seed);
  const AABox bounds(0.0, 0.0, canvas.width, canvas.height);
  const auto clip = [&bounds](double x0, double y0, double x1, double y1) {
    return AABox(std::clamp(x0, bounds.x_min(), bounds.x_max()),
                 std::clamp(y0, bounds.y_min(), bounds.y_max()),
                 std::clamp(x1, bounds.x_min(), bounds.x_max()),
                 std::clamp(y1, bounds.y_min(), bounds.y_max()));
  };
  std::vector<Proposal> out;
  out.reserve(gts.size() * static_cast<std::size_t>(std::max(0, cfg.per_gt)));
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const AABox& g = gts[i];
    for (int r = 0; r < cfg.per_gt; ++r) {
      const double cx = g.center_x() + rng.uniform(-cfg.shift_noise, cfg.shift_noise) * g.width();
      const double cy =
          g.center_y() + rng.uniform(-cfg.shift_noise, cfg.shift_noise) * g.height();
      const double bw = g.width() * std::exp(rng.uniform(-cfg.scale_noise, cfg.scale_noise));
      const double bh = g.height() * std::exp(rng.uniform(-cfg.scale_noise, cfg.scale_noise));
      AABox box = clip(cx - 0.5 * bw, cy - 0.5 * bh, cx + 0.5 * bw, cy + 0.5 * bh);
      if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
        box = clip(g.x_min(), g.y_min(), g.x_max(), g.y_max());
      }
      out.push_back(Proposal{box, i});
    }
  }
  return out;
}

std::vector<AABox> instance_boxes(std::span<const TextInstance> instances) {
  std::vector<AABox> out;
  out.reserve(instances.size());
  for (const TextInstance& inst : instances) out.push_back(inst.polygon.bounds());
  return out;
}

}  // namespace mayor
