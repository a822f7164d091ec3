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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "mayor/data.h"
#include "mayor/mask_head.h"
#include "mayor/random.h"

namespace mayor {
namespace {

constexpr HeadShape kSmall{4, 3, 4, 8, 12};

std::vector<double> Vec(std::span<const double> s) { return {s.begin(), s.end()}; }

double Relu(double v, bool on) { return on ? std::max(0.0, v) : v; }

// Straightforward loops over the documented weight layouts.
std::vector<double> ReferenceForward(const MaskHeadModel& m, const Tensor& t) {
  const HeadShape& s = m.shape();
  const bool relu = !m.linear();
  const int n = s.input_side;
  std::vector<double> x(t.values().begin(), t.values().end());
  int cin = s.input_channels;
  for (int layer = 0; layer < 4; ++layer) {
    const auto w = m.block("enc" + std::to_string(layer) + ".weight");
    const auto b = m.block("enc" + std::to_string(layer) + ".bias");
    std::vector<double> y(static_cast<std::size_t>(s.channels * n * n));
    for (int o = 0; o < s.channels; ++o) {
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          double acc = b[o];
          for (int i = 0; i < cin; ++i) {
            for (int ky = 0; ky < 3; ++ky) {
              for (int kx = 0; kx < 3; ++kx) {
                const int rr = r + ky - 1, cc = c + kx - 1;
                if (rr < 0 || cc < 0 || rr >= n || cc >= n) continue;
                acc += w[((o * cin + i) * 3 + ky) * 3 + kx] * x[(i * n + rr) * n + cc];
              }
            }
          }
          y[(o * n + r) * n + c] = Relu(acc, relu);
        }
      }
    }
    x = std::move(y);
    cin = s.channels;
  }
  const int big = s.output_side;
  const auto cells = static_cast<std::size_t>(big * big);
  std::vector<double> out(cells);
  if (m.kind() == DecoderKind::kFcFc) {
    const auto w1 = m.block("fc1.weight"), b1 = m.block("fc1.bias");
    const auto w2 = m.block("fc2.weight"), b2 = m.block("fc2.bias");
    std::vector<double> h(static_cast<std::size_t>(s.hidden));
    for (std::size_t j = 0; j < h.size(); ++j) {
      double acc = b1[j];
      for (std::size_t i = 0; i < x.size(); ++i) acc += w1[j * x.size() + i] * x[i];
      h[j] = Relu(acc, relu);
    }
    for (std::size_t j = 0; j < cells; ++j) {
      double acc = b2[j];
      for (std::size_t i = 0; i < h.size(); ++i) acc += w2[j * h.size() + i] * h[i];
      out[j] = acc;
    }
    return out;
  }
  const int c = s.channels;
  const auto wd = m.block("deconv.weight"), bd = m.block("deconv.bias");
  std::vector<double> up(static_cast<std::size_t>(c) * cells);
  for (int o = 0; o < c; ++o) {
    for (int r = 0; r < big; ++r) {
      for (int q = 0; q < big; ++q) {
        double acc = bd[o];
        const int dy = r % 2, dx = q % 2;
        for (int i = 0; i < c; ++i) {
          acc += wd[((o * 2 + dy) * 2 + dx) * c + i] * x[(i * n + r / 2) * n + q / 2];
        }
        up[(o * big + r) * big + q] = Relu(acc, relu);
      }
    }
  }
  const auto wp = m.block("pred.weight"), bp = m.block("pred.bias");
  for (std::size_t p = 0; p < cells; ++p) {
    double acc = 0.0;
    switch (m.kind()) {
      case DecoderKind::kDeconvConv:
        acc = bp[0];
        for (int i = 0; i < c; ++i) acc += wp[i] * up[i * cells + p];
        break;
      case DecoderKind::kDeconvLC:
        acc = bp[p];
        for (int i = 0; i < c; ++i) acc += wp[p * c + i] * up[i * cells + p];
        break;
      default:
        acc = bp[p];
        for (std::size_t i = 0; i < up.size(); ++i) acc += wp[p * up.size() + i] * up[i];
        break;
    }
    out[p] = acc;
  }
  return out;
}

Tensor RandomFeatures(const HeadShape& s, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t({s.input_channels, s.input_side, s.input_side});
  for (double& v : t.values()) v = rng.uniform(-1, 1);
  return t;
}

MaskTarget RandomTarget(int side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(side * side));
  for (auto& v : cells) v = rng.uniform() < 0.4 ? 1 : 0;
  return MaskTarget(side, cells);
}

// Bias perturbations keep ReLUs clear of their kinks in a random network.
void RandomizeBiases(MaskHeadModel& m, std::uint64_t seed) {
  Rng rng(seed);
  for (const ParameterBlock& b : m.blocks()) {
    if (b.name.ends_with(".bias")) {
      for (double& v : m.block(b.name)) v = rng.uniform(-0.1, 0.1);
    }
  }
}

double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TEST_CASE("decoder kind names") {
  for (DecoderKind k : kAllDecoderKinds) CHECK(parse_decoder_kind(to_string(k)) == k);
  CHECK_FALSE(parse_decoder_kind("deconv"));
}

TEST_CASE("build_model") {
  const HeadShape shape{14, 3, 32, 28, 256};
  const MaskHeadModel a = build_model(DecoderKind::kFcFc, shape, 7);
  const MaskHeadModel b = build_model(DecoderKind::kFcFc, shape, 7);
  CHECK(Vec(a.parameters()) == Vec(b.parameters()));
  CHECK(Vec(a.parameters()) != Vec(build_model(DecoderKind::kFcFc, shape, 8).parameters()));

  const MaskHeadModel lc = build_model(DecoderKind::kDeconvLC, shape, 1);
  CHECK(lc.block("pred.weight").size() + lc.block("pred.bias").size() == 28u * 28u * 33u);
  CHECK(forward(build_model(DecoderKind::kDeconvConv, shape, 1), Tensor({3, 14, 14})).size() ==
        28u * 28u);
  CHECK_THROWS_AS(MaskHeadModel(DecoderKind::kDeconvConv, HeadShape{14, 3, 8, 20, 16}),
                  std::invalid_argument);
  CHECK_NOTHROW(MaskHeadModel(DecoderKind::kFcFc, HeadShape{14, 3, 8, 20, 16}));
  CHECK_THROWS_AS(MaskHeadModel(DecoderKind::kFcFc, HeadShape{14, 3, 0, 28, 16}),
                  std::invalid_argument);
  CHECK_THROWS_AS(lc.block("nope.weight"), std::out_of_range);

  std::size_t total = 0;
  for (const ParameterBlock& blk : a.blocks()) {
    CHECK(blk.offset == total);
    total += blk.size;
  }
  CHECK(total == a.parameter_count());

  // Glorot bounds per layer; biases zero.
  const double conv_bound = std::sqrt(6.0 / (9.0 * 3 + 9.0 * 32));
  for (double v : a.block("enc0.weight")) CHECK(std::abs(v) <= conv_bound);
  for (double v : a.block("fc1.bias")) CHECK(v == 0.0);
}

TEST_CASE("forward") {
  SUBCASE("zero network") {
    for (DecoderKind k : kAllDecoderKinds) {
      MaskHeadModel m(k, kSmall);
      for (double v : forward(m, RandomFeatures(kSmall, 1))) CHECK(v == 0.0);
    }
  }
  SUBCASE("affine path on zero input") {
    MaskHeadModel m = build_model(DecoderKind::kFcFc, kSmall, 2);
    RandomizeBiases(m, 3);
    // With a zero input the encoder emits relu(bias); zero every
    // non-final weight to make the logits the final bias.
    for (const char* name : {"enc0.weight", "enc1.weight", "enc2.weight", "enc3.weight", "fc1.weight",
                             "fc2.weight"}) {
      for (double& v : m.block(name)) v = 0.0;
    }
    const auto out = forward(m, Tensor({3, 4, 4}));
    CHECK(out == Vec(m.block("fc2.bias")));
  }
  SUBCASE("reference implementation") {
    for (DecoderKind k : kAllDecoderKinds) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        MaskHeadModel m = build_model(k, kSmall, seed);
        RandomizeBiases(m, seed + 100);
        const Tensor f = RandomFeatures(kSmall, seed + 200);
        CHECK(MaxAbsDiff(forward(m, f), ReferenceForward(m, f)) <= 1e-9);
        m.set_linear(true);
        CHECK(MaxAbsDiff(forward(m, f), ReferenceForward(m, f)) <= 1e-9);
      }
    }
  }
  SUBCASE("forward_batch matches forward for any jobs") {
    const MaskHeadModel m = build_model(DecoderKind::kDeconvFC, kSmall, 4);
    std::vector<Tensor> fs;
    for (int i = 0; i < 5; ++i) fs.push_back(RandomFeatures(kSmall, 50 + i));
    const auto one = forward_batch(m, fs, 1);
    CHECK(forward_batch(m, fs, 3) == one);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      CHECK(MaxAbsDiff(one[i], forward(m, fs[i])) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(forward(MaskHeadModel(DecoderKind::kFcFc, kSmall), Tensor({3, 5, 5})),
                  std::invalid_argument);
}

TEST_CASE("mask_loss") {
  const MaskTarget t = RandomTarget(8, 5);
  CHECK(mask_loss(std::vector<double>(64, 0.0), t) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  std::vector<double> sat(64);
  for (std::size_t i = 0; i < 64; ++i) sat[i] = t.cells()[i] ? 40.0 : -40.0;
  CHECK(mask_loss(sat, t) <= 1e-15);

  Rng rng(6);
  std::vector<double> z(64);
  for (double& v : z) v = rng.uniform(-6, 6);
  double by_hand = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-z[i]));
    by_hand -= t.cells()[i] ? std::log(p) : std::log(1.0 - p);
  }
  CHECK(std::abs(mask_loss(z, t) - by_hand / 64) <= 1e-12);
  CHECK_THROWS_AS(mask_loss(z, RandomTarget(4, 1)), std::invalid_argument);
}

TEST_CASE("backward") {
  SUBCASE("zero gradient at a saturated fit") {
    MaskHeadModel m(DecoderKind::kDeconvConv, kSmall);
    const MaskTarget all(8, std::vector<std::uint8_t>(64, 1));
    m.block("pred.bias")[0] = 60.0;
    backward(m, RandomFeatures(kSmall, 1), all);
    for (double g : m.gradients()) CHECK(std::abs(g) <= 1e-12);
  }
  SUBCASE("summed identical samples double the gradient") {
    MaskHeadModel m = build_model(DecoderKind::kDeconvLC, kSmall, 9);
    RoISample s{AABox(0, 0, 1, 1), 0, RandomFeatures(kSmall, 2), RandomTarget(8, 3)};
    const double loss = backward(m, s.features, s.target);
    const std::vector<double> single = Vec(m.gradients());
    const std::vector<RoISample> samples{s, s};
    const std::vector<std::size_t> idx{0, 1};
    CHECK(backward_batch(m, samples, idx) == doctest::Approx(2 * loss).epsilon(1e-14));
    for (std::size_t i = 0; i < single.size(); ++i) {
      CHECK(m.gradients()[i] == doctest::Approx(2 * single[i]).epsilon(1e-12));
    }
  }
  SUBCASE("batch gradient is order and jobs invariant") {
    for (DecoderKind k : kAllDecoderKinds) {
      MaskHeadModel m = build_model(k, kSmall, 11);
      RandomizeBiases(m, 12);
      std::vector<RoISample> samples;
      for (int i = 0; i < 7; ++i) {
        samples.push_back({AABox(0, 0, 1, 1), 0, RandomFeatures(kSmall, 20 + i), RandomTarget(8, 40 + i)});
      }
      std::vector<std::size_t> idx(7);
      std::iota(idx.begin(), idx.end(), 0);
      const double l1 = backward_batch(m, samples, idx, 1);
      const std::vector<double> g1 = Vec(m.gradients());
      CHECK(backward_batch(m, samples, idx, 4) == l1);
      CHECK(Vec(m.gradients()) == g1);
      std::reverse(idx.begin(), idx.end());
      std::swap(idx[1], idx[4]);
      CHECK(backward_batch(m, samples, idx, 2) == doctest::Approx(l1).epsilon(1e-12));
      CHECK(MaxAbsDiff(m.gradients(), g1) <= 1e-10);
    }
  }
}

TEST_CASE("grad_check across decoders and seeds") {
  for (DecoderKind k : kAllDecoderKinds) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CAPTURE(to_string(k));
      CAPTURE(seed);
      MaskHeadModel m = build_model(k, kSmall, seed);
      RandomizeBiases(m, seed + 1000);
      const Tensor f = RandomFeatures(kSmall, seed + 2000);
      const MaskTarget t = RandomTarget(8, seed + 3000);
      GradCheckOptions opts;
      opts.seed = seed;
      const GradCheckResult r = grad_check(m, f, t, 1e-4, opts);
      CHECK(r.checked >= 50);
      CHECK(r.max_relative_error <= 1e-3);

      opts.extra_indices = {r.worst_index};
      opts.corrupt = [idx = r.worst_index](std::span<double> g) { g[idx] *= 2.0; };
      CHECK(grad_check(m, f, t, 1e-4, opts).max_relative_error > 0.1);
    }
  }
}

TEST_CASE("grad_check on a linear model") {
  for (DecoderKind k : kAllDecoderKinds) {
    MaskHeadModel m = build_model(k, kSmall, 5);
    m.set_linear(true);
    const GradCheckResult r = grad_check(m, RandomFeatures(kSmall, 6), RandomTarget(8, 7), 1e-4);
    CHECK(r.skipped_kinks == 0);
    // Only the sigmoid loss is non-linear; central differences are O(eps^2).
    CHECK(r.max_relative_error <= 1e-6);
  }
  MaskHeadModel m = build_model(DecoderKind::kFcFc, kSmall, 1);
  CHECK_THROWS_AS(grad_check(m, RandomFeatures(kSmall, 1), RandomTarget(8, 1), 1e-2),
                  std::invalid_argument);
}

TEST_CASE("tied locally connected predictor equals the pointwise one") {
  MaskHeadModel conv = build_model(DecoderKind::kDeconvConv, kSmall, 21);
  RandomizeBiases(conv, 22);
  MaskHeadModel lc(DecoderKind::kDeconvLC, kSmall);
  for (const ParameterBlock& b : conv.blocks()) {
    if (b.name.starts_with("pred")) continue;
    std::ranges::copy(conv.block(b.name), lc.block(b.name).begin());
  }
  const auto w = conv.block("pred.weight");
  const int cells = kSmall.output_side * kSmall.output_side;
  for (int p = 0; p < cells; ++p) {
    std::ranges::copy(w, lc.block("pred.weight").begin() + p * kSmall.channels);
    lc.block("pred.bias")[p] = conv.block("pred.bias")[0];
  }
  for (int i = 0; i < 5; ++i) {
    const Tensor f = RandomFeatures(kSmall, 300 + i);
    CHECK(forward(lc, f) == forward(conv, f));
  }
}

TEST_CASE("dense predictor embeds the locally connected one") {
  MaskHeadModel lc = build_model(DecoderKind::kDeconvLC, kSmall, 31);
  RandomizeBiases(lc, 32);
  MaskHeadModel fc(DecoderKind::kDeconvFC, kSmall);
  for (const ParameterBlock& b : lc.blocks()) {
    if (b.name == "pred.weight") continue;
    std::ranges::copy(lc.block(b.name), fc.block(b.name).begin());
  }
  const int cells = kSmall.output_side * kSmall.output_side;
  const auto src = lc.block("pred.weight");
  auto dst = fc.block("pred.weight");
  for (int p = 0; p < cells; ++p) {
    for (int c = 0; c < kSmall.channels; ++c) {
      dst[static_cast<std::size_t>(p) * kSmall.channels * cells + c * cells + p] =
          src[static_cast<std::size_t>(p * kSmall.channels + c)];
    }
  }
  for (int i = 0; i < 5; ++i) {
    const Tensor f = RandomFeatures(kSmall, 400 + i);
    CHECK(MaxAbsDiff(forward(fc, f), forward(lc, f)) <= 1e-12);
  }
}

std::vector<RoISample> SmallSamples(int count) {
  std::vector<RoISample> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({AABox(0, 0, 1, 1), 0, RandomFeatures(kSmall, 500 + i), RandomTarget(8, 600 + i)});
  }
  return out;
}

TEST_CASE("train") {
  SUBCASE("memorizes one sample") {
    std::vector<std::uint8_t> band(64, 0);
    std::fill(band.begin() + 16, band.begin() + 40, 1);
    const std::vector<RoISample> one{
        {AABox(0, 0, 1, 1), 0, RandomFeatures(kSmall, 1), MaskTarget(8, band)}};
    for (DecoderKind k : kAllDecoderKinds) {
      MaskHeadModel m = build_model(k, kSmall, 3);
      TrainConfig cfg;
      cfg.iterations = 400;
      cfg.learning_rate = 0.05;
      const TrainHistory h = train(m, one, cfg);
      CAPTURE(to_string(k));
      CHECK(h.loss.size() == 400u);
      CHECK(h.loss.back() < 0.05);
    }
  }
  SUBCASE("deterministic per seed, independent of jobs") {
    const auto samples = SmallSamples(20);
    TrainConfig cfg;
    cfg.iterations = 30;
    cfg.batch_size = 4;
    cfg.seed = 9;
    MaskHeadModel a = build_model(DecoderKind::kFcFc, kSmall, 1);
    MaskHeadModel b = build_model(DecoderKind::kFcFc, kSmall, 1);
    MaskHeadModel c = build_model(DecoderKind::kFcFc, kSmall, 1);
    const auto ha = train(a, samples, cfg);
    CHECK(train(b, samples, cfg).loss == ha.loss);
    CHECK(Vec(a.parameters()) == Vec(b.parameters()));
    cfg.jobs = 3;
    CHECK(train(c, samples, cfg).loss == ha.loss);
    CHECK(Vec(c.parameters()) == Vec(a.parameters()));
  }
  SUBCASE("zero learning rate") {
    const auto samples = SmallSamples(5);
    TrainConfig cfg;
    cfg.iterations = 10;
    cfg.learning_rate = 0.0;
    cfg.batch_size = 5;
    MaskHeadModel m = build_model(DecoderKind::kDeconvConv, kSmall, 1);
    const auto before = Vec(m.parameters());
    const auto h = train(m, samples, cfg);
    for (double l : h.loss) CHECK(l == h.loss.front());
    CHECK(Vec(m.parameters()) == before);
  }
  SUBCASE("validation and divergence") {
    MaskHeadModel m = build_model(DecoderKind::kFcFc, kSmall, 1);
    TrainConfig cfg;
    cfg.iterations = 0;
    CHECK_THROWS_AS(train(m, SmallSamples(1), cfg), std::invalid_argument);
    cfg.iterations = 1;
    CHECK_THROWS_AS(train(m, {}, cfg), std::invalid_argument);
    cfg.iterations = 50;
    cfg.learning_rate = 1e200;
    CHECK_THROWS_WITH_AS(train(m, SmallSamples(2), cfg), doctest::Contains("lr"),
                         std::runtime_error);
  }
}

TEST_CASE("predict_polygons") {
  SynthConfig scfg;
  scfg.seed = 5;
  const ImageRecord r = gen_dense_scene(scfg);
  const HeadShape shape{14, 3, 4, 28, 8};
  const std::vector<AABox> boxes = instance_boxes(r.instances);

  MaskHeadModel fg(DecoderKind::kDeconvConv, shape);
  fg.block("pred.bias")[0] = 30.0;
  const AABox box = boxes.front();
  const auto one = predict_polygons(fg, r, std::vector<AABox>{box});
  REQUIRE(one.size() == 1);
  CHECK(polygon_iou(one[0].polygon, box_polygon(box)) >= 0.9);
  CHECK(one[0].score == doctest::Approx(1.0));

  const auto dup = predict_polygons(fg, r, std::vector<AABox>{box, box});
  CHECK(dup.size() == 1);

  MaskHeadModel bg(DecoderKind::kDeconvConv, shape);
  bg.block("pred.bias")[0] = -30.0;
  CHECK(predict_polygons(bg, r, boxes).empty());

  PredictConfig parallel;
  parallel.jobs = 3;
  const MaskHeadModel rnd = build_model(DecoderKind::kFcFc, shape, 2);
  const auto serial = predict_polygons(rnd, r, boxes);
  const auto par = predict_polygons(rnd, r, boxes, parallel);
  REQUIRE(serial.size() == par.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].polygon == par[i].polygon);
    CHECK(serial[i].score == par[i].score);
  }
}

TEST_CASE("count_flops") {
  const HeadShape paper{14, 256, 256, 28, 1024};
  const double fcfc = count_flops(DecoderKind::kFcFc, paper, 100).decoder;
  const double dc = count_flops(DecoderKind::kDeconvConv, paper, 100).decoder;
  CHECK(std::abs(fcfc / 5.3e9 - 1) <= 0.10);
  CHECK(std::abs(dc / 5.2e9 - 1) <= 0.10);
  for (DecoderKind k : kAllDecoderKinds) {
    CHECK(count_flops(k, paper, 0).total() == 0.0);
    const double one = count_flops(k, paper, 1).total();
    CHECK(count_flops(k, paper, 37).total() == doctest::Approx(37 * one));
    double prev = 0.0;
    for (int c : {8, 16, 32, 64}) {
      HeadShape s = paper;
      s.channels = c;
      const double f = count_flops(k, s, 10).total();
      CHECK(f > prev);
      prev = f;
    }
  }
  CHECK(count_flops(DecoderKind::kDeconvLC, paper, 5).total() ==
        count_flops(DecoderKind::kDeconvConv, paper, 5).total());
  CHECK(count_flops(DecoderKind::kDeconvFC, paper, 5).total() >
        count_flops(DecoderKind::kDeconvLC, paper, 5).total());
}

TEST_CASE("checkpoint and history IO") {
  const auto dir = std::filesystem::temp_directory_path() / "mayor_mask_head_test";
  std::filesystem::create_directories(dir);
  for (DecoderKind k : kAllDecoderKinds) {
    const MaskHeadModel m = build_model(k, kSmall, 77);
    save_checkpoint(m, dir / "m.bin");
    const MaskHeadModel back = load_checkpoint(dir / "m.bin");
    CHECK(back.kind() == k);
    CHECK(back.shape() == kSmall);
    CHECK(Vec(back.parameters()) == Vec(m.parameters()));
    CHECK(std::filesystem::file_size(dir / "m.bin") == 4 + 4 + 20 + 8 + 8 * m.parameter_count());
  }
  {
    std::ifstream in(dir / "m.bin", std::ios::binary);
    char magic[5] = {};
    in.read(magic, 4);
    CHECK(std::string(magic) == "MDL1");
  }
  std::filesystem::resize_file(dir / "m.bin", 40);
  CHECK_THROWS_WITH_AS(load_checkpoint(dir / "m.bin"), doctest::Contains("truncated"),
                       std::runtime_error);
  { std::ofstream(dir / "bad.bin") << "nope"; }
  CHECK_THROWS_AS(load_checkpoint(dir / "bad.bin"), std::runtime_error);

  write_history_csv(TrainHistory{{0.5, 0.25}}, dir / "h.csv");
  std::ifstream in(dir / "h.csv");
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text == "iteration,loss\n0,0.5\n1,0.25\n");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mayor
