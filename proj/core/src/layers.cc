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

#include "layers.h"

#include <vector>

#include "mayor/aligned.h"
#include "mayor/parallel.h"

namespace mayor::internal {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

// Rows are (channel, ky, kx), columns are output positions; zero padding.
void Im2Col(const double* x, int channels, int side, RowMatrix& cols) {
  const int p_count = side * side;
  cols.resize(channels * 9, p_count);
  for (int c = 0; c < channels; ++c) {
    const double* plane = x + static_cast<std::ptrdiff_t>(c) * p_count;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double* row = cols.row(c * 9 + ky * 3 + kx).data();
        for (int y = 0; y < side; ++y) {
          const int sy = y + ky - 1;
          for (int x_out = 0; x_out < side; ++x_out) {
            const int sx = x_out + kx - 1;
            row[y * side + x_out] =
                (sy >= 0 && sy < side && sx >= 0 && sx < side) ? plane[sy * side + sx] : 0.0;
          }
        }
      }
    }
  }
}

void Col2Im(const RowMatrix& cols, int channels, int side, double* dx) {
  const int p_count = side * side;
  for (int i = 0; i < channels * p_count; ++i) dx[i] = 0.0;
  for (int c = 0; c < channels; ++c) {
    double* plane = dx + static_cast<std::ptrdiff_t>(c) * p_count;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double* row = cols.row(c * 9 + ky * 3 + kx).data();
        for (int y = 0; y < side; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= side) continue;
          for (int x_out = 0; x_out < side; ++x_out) {
            const int sx = x_out + kx - 1;
            if (sx >= 0 && sx < side) plane[sy * side + sx] += row[y * side + x_out];
          }
        }
      }
    }
  }
}

// Adds per-sample parameter gradients in sample order so the sum is the same
// for any thread count.
void Reduce(const std::vector<AlignedVector>& per_sample, double* grads) {
  for (const auto& g : per_sample) {
    for (std::size_t i = 0; i < g.size(); ++i) grads[i] += g[i];
  }
}

void ConvForward(const LayerSpec& l, const double* params, const Batch& in, Batch& out, int jobs) {
  const int side = l.in_side;
  const ConstRowMap w(params + l.weight_offset, l.out_channels, l.in_channels * 9);
  const ConstVectorMap b(params + l.bias_offset, l.out_channels);
  parallel_for(static_cast<std::size_t>(in.cols()), jobs, [&](std::size_t s) {
    RowMatrix cols;
    Im2Col(in.col(static_cast<Eigen::Index>(s)).data(), l.in_channels, side, cols);
    RowMap y(out.col(static_cast<Eigen::Index>(s)).data(), l.out_channels, side * side);
    y.noalias() = w * cols;
    y.colwise() += b;
  });
}

void ConvBackward(const LayerSpec& l, const double* params, const Batch& in, const Batch& g_out,
                  Batch* g_in, double* grads, int jobs) {
  const int side = l.in_side;
  const ConstRowMap w(params + l.weight_offset, l.out_channels, l.in_channels * 9);
  std::vector<AlignedVector> dw(static_cast<std::size_t>(in.cols()));
  std::vector<AlignedVector> db(static_cast<std::size_t>(in.cols()));
  parallel_for(static_cast<std::size_t>(in.cols()), jobs, [&](std::size_t s) {
    const auto si = static_cast<Eigen::Index>(s);
    RowMatrix cols;
    Im2Col(in.col(si).data(), l.in_channels, side, cols);
    const ConstRowMap g(g_out.col(si).data(), l.out_channels, side * side);
    dw[s].assign(l.weight_size, 0.0);
    RowMap(dw[s].data(), l.out_channels, l.in_channels * 9).noalias() = g * cols.transpose();
    db[s].resize(l.bias_size);
    VectorMap(db[s].data(), l.out_channels) = g.rowwise().sum();
    if (g_in != nullptr) {
      const RowMatrix dcols = w.transpose() * g;
      Col2Im(dcols, l.in_channels, side, g_in->col(si).data());
    }
  });
  Reduce(dw, grads + l.weight_offset);
  Reduce(db, grads + l.bias_offset);
}

void DeconvForward(const LayerSpec& l, const double* params, const Batch& in, Batch& out,
                   int jobs) {
  const int side = l.in_side;
  const int out_side = 2 * side;
  const ConstRowMap m(params + l.weight_offset, l.out_channels * 4, l.in_channels);
  const double* b = params + l.bias_offset;
  parallel_for(static_cast<std::size_t>(in.cols()), jobs, [&](std::size_t s) {
    const auto si = static_cast<Eigen::Index>(s);
    const ConstRowMap x(in.col(si).data(), l.in_channels, side * side);
    const RowMatrix y4 = m * x;
    double* y = out.col(si).data();
    for (int co = 0; co < l.out_channels; ++co) {
      for (int k = 0; k < 4; ++k) {
        const int dy = k / 2, dx = k % 2;
        const double* row = y4.row(co * 4 + k).data();
        for (int py = 0; py < side; ++py) {
          for (int px = 0; px < side; ++px) {
            y[(co * out_side + 2 * py + dy) * out_side + 2 * px + dx] = row[py * side + px] + b[co];
          }
        }
      }
    }
  });
}

void DeconvBackward(const LayerSpec& l, const double* params, const Batch& in, const Batch& g_out,
                    Batch* g_in, double* grads, int jobs) {
  const int side = l.in_side;
  const int out_side = 2 * side;
  const ConstRowMap m(params + l.weight_offset, l.out_channels * 4, l.in_channels);
  std::vector<AlignedVector> dm(static_cast<std::size_t>(in.cols()));
  std::vector<AlignedVector> db(static_cast<std::size_t>(in.cols()));
  parallel_for(static_cast<std::size_t>(in.cols()), jobs, [&](std::size_t s) {
    const auto si = static_cast<Eigen::Index>(s);
    const double* g = g_out.col(si).data();
    RowMatrix g4(l.out_channels * 4, side * side);
    db[s].assign(l.bias_size, 0.0);
    for (int co = 0; co < l.out_channels; ++co) {
      for (int k = 0; k < 4; ++k) {
        const int dy = k / 2, dx = k % 2;
        double* row = g4.row(co * 4 + k).data();
        for (int py = 0; py < side; ++py) {
          for (int px = 0; px < side; ++px) {
            row[py * side + px] = g[(co * out_side + 2 * py + dy) * out_side + 2 * px + dx];
          }
        }
      }
      const double* plane = g + static_cast<std::ptrdiff_t>(co) * out_side * out_side;
      double sum = 0.0;
      for (int i = 0; i < out_side * out_side; ++i) sum += plane[i];
      db[s][static_cast<std::size_t>(co)] = sum;
    }
    const ConstRowMap x(in.col(si).data(), l.in_channels, side * side);
    dm[s].assign(l.weight_size, 0.0);
    RowMap(dm[s].data(), l.out_channels * 4, l.in_channels).noalias() = g4 * x.transpose();
    if (g_in != nullptr) {
      RowMap(g_in->col(si).data(), l.in_channels, side * side).noalias() = m.transpose() * g4;
    }
  });
  Reduce(dm, grads + l.weight_offset);
  Reduce(db, grads + l.bias_offset);
}

// Same accumulation order as LocalForward, so a locally connected layer with
// tied weights reproduces this one bit for bit.
void PointwiseForward(const LayerSpec& l, const double* params, const Batch& in, Batch& out) {
  const int p_count = l.in_side * l.in_side;
  const double* w = params + l.weight_offset;
  const double b = params[l.bias_offset];
  for (Eigen::Index s = 0; s < in.cols(); ++s) {
    const double* x = in.col(s).data();
    double* y = out.col(s).data();
    for (int p = 0; p < p_count; ++p) {
      double acc = b;
      for (int c = 0; c < l.in_channels; ++c) acc += w[c] * x[c * p_count + p];
      y[p] = acc;
    }
  }
}

void PointwiseBackward(const LayerSpec& l, const double* params, const Batch& in,
                       const Batch& g_out, Batch* g_in, double* grads) {
  const int p_count = l.in_side * l.in_side;
  const ConstVectorMap w(params + l.weight_offset, l.in_channels);
  VectorMap dw(grads + l.weight_offset, l.in_channels);
  for (Eigen::Index s = 0; s < in.cols(); ++s) {
    const ConstRowMap x(in.col(s).data(), l.in_channels, p_count);
    const ConstVectorMap g(g_out.col(s).data(), p_count);
    dw.noalias() += x * g;
    grads[l.bias_offset] += g.sum();
    if (g_in != nullptr) {
      RowMap(g_in->col(s).data(), l.in_channels, p_count).noalias() = w * g.transpose();
    }
  }
}

void LocalForward(const LayerSpec& l, const double* params, const Batch& in, Batch& out) {
  const int p_count = l.in_side * l.in_side;
  const double* w = params + l.weight_offset;
  const double* b = params + l.bias_offset;
  for (Eigen::Index s = 0; s < in.cols(); ++s) {
    const double* x = in.col(s).data();
    double* y = out.col(s).data();
    for (int p = 0; p < p_count; ++p) {
      double acc = b[p];
      for (int c = 0; c < l.in_channels; ++c) acc += w[p * l.in_channels + c] * x[c * p_count + p];
      y[p] = acc;
    }
  }
}

void LocalBackward(const LayerSpec& l, const double* params, const Batch& in, const Batch& g_out,
                   Batch* g_in, double* grads) {
  const int p_count = l.in_side * l.in_side;
  const double* w = params + l.weight_offset;
  double* dw = grads + l.weight_offset;
  double* db = grads + l.bias_offset;
  for (Eigen::Index s = 0; s < in.cols(); ++s) {
    const double* x = in.col(s).data();
    const double* g = g_out.col(s).data();
    double* dx = g_in != nullptr ? g_in->col(s).data() : nullptr;
    for (int p = 0; p < p_count; ++p) {
      db[p] += g[p];
      for (int c = 0; c < l.in_channels; ++c) {
        dw[p * l.in_channels + c] += g[p] * x[c * p_count + p];
        if (dx != nullptr) dx[c * p_count + p] = w[p * l.in_channels + c] * g[p];
      }
    }
  }
}

void DenseForward(const LayerSpec& l, const double* params, const Batch& in, Batch& out) {
  const ConstRowMap w(params + l.weight_offset, l.out_channels, l.in_channels);
  const ConstVectorMap b(params + l.bias_offset, l.out_channels);
  out.noalias() = w * in;
  out.colwise() += b;
}

void DenseBackward(const LayerSpec& l, const double* params, const Batch& in, const Batch& g_out,
                   Batch* g_in, double* grads) {
  const ConstRowMap w(params + l.weight_offset, l.out_channels, l.in_channels);
  RowMap(grads + l.weight_offset, l.out_channels, l.in_channels).noalias() +=
      g_out * in.transpose();
  VectorMap(grads + l.bias_offset, l.out_channels) += g_out.rowwise().sum();
  if (g_in != nullptr) g_in->noalias() = w.transpose() * g_out;
}

}  // namespace

void LayerForward(const LayerSpec& layer, const double* params, bool relu, const Batch& in,
                  Batch& out, int jobs) {
  out.resize(static_cast<Eigen::Index>(layer.output_size()), in.cols());
  switch (layer.type) {
    case LayerSpec::Type::kConv3x3:
      ConvForward(layer, params, in, out, jobs);
      break;
    case LayerSpec::Type::kDeconv2x2:
      DeconvForward(layer, params, in, out, jobs);
      break;
    case LayerSpec::Type::kPointwise:
      PointwiseForward(layer, params, in, out);
      break;
    case LayerSpec::Type::kLocallyConnected:
      LocalForward(layer, params, in, out);
      break;
    case LayerSpec::Type::kDense:
      DenseForward(layer, params, in, out);
      break;
  }
  if (relu) out = out.cwiseMax(0.0);
}

void LayerBackward(const LayerSpec& layer, const double* params, bool relu, const Batch& in,
                   const Batch& out, Batch& grad_out, Batch* grad_in, double* grads, int jobs) {
  if (relu) grad_out = (out.array() > 0.0).select(grad_out, 0.0);
  if (grad_in != nullptr) grad_in->resize(in.rows(), in.cols());
  switch (layer.type) {
    case LayerSpec::Type::kConv3x3:
      ConvBackward(layer, params, in, grad_out, grad_in, grads, jobs);
      break;
    case LayerSpec::Type::kDeconv2x2:
      DeconvBackward(layer, params, in, grad_out, grad_in, grads, jobs);
      break;
    case LayerSpec::Type::kPointwise:
      PointwiseBackward(layer, params, in, grad_out, grad_in, grads);
      break;
    case LayerSpec::Type::kLocallyConnected:
      LocalBackward(layer, params, in, grad_out, grad_in, grads);
      break;
    case LayerSpec::Type::kDense:
      DenseBackward(layer, params, in, grad_out, grad_in, grads);
      break;
  }
}

}  // namespace mayor::internal
