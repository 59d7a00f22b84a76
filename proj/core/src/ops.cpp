// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsa/error.hpp"

namespace tsa::ad {

namespace {

struct ConvGeometry {
  std::size_t out_channels;
  std::size_t in_channels;
  std::size_t kernel;
};

ConvGeometry conv_geometry(const Tensor2D& input, const ParamTensor& weight, const ParamTensor& bias) {
  if (weight.shape.size() != 3) {
    throw ShapeError("conv weight '" + weight.name + "' must have rank 3 [C_out, C_in, K]");
  }
  ConvGeometry g{weight.shape[0], weight.shape[1], weight.shape[2]};
  if (g.kernel % 2 == 0) throw ShapeError("conv kernel size must be odd, got " + std::to_string(g.kernel));
  if (g.in_channels != input.channels()) {
    throw ShapeError("conv '" + weight.name + "' expects " + std::to_string(g.in_channels) +
                     " input channels, got input " + input.shape_string());
  }
  if (bias.size() != g.out_channels) {
    throw ShapeError("conv bias '" + bias.name + "' has " + std::to_string(bias.size()) +
                     " values, expected " + std::to_string(g.out_channels));
  }
  return g;
}

void require_same_shape(const Tensor2D& a, const Tensor2D& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
  }
}

constexpr std::size_t kBlock = 32;
constexpr std::size_t kTile = 4;
constexpr std::size_t kLanes = 8;

// Output channels [c, c + C) x time [t0, t0 + B) of a conv over padded rows.
template <std::size_t C, std::size_t B>
void conv_tile(const double* xp, std::size_t row, const double* weight, const double* bias, std::size_t in_channels,
               std::size_t kernel, std::size_t dilation, std::size_t c, Tensor2D& out, std::size_t t0) {
  double acc[C][B];
  for (std::size_t r = 0; r < C; ++r) {
    for (std::size_t j = 0; j < B; ++j) acc[r][j] = bias[c + r];
  }
  for (std::size_t i = 0; i < in_channels; ++i) {
    for (std::size_t k = 0; k < kernel; ++k) {
      const double* src = xp + i * row + k * dilation;
      for (std::size_t r = 0; r < C; ++r) {
        const double wk = weight[((c + r) * in_channels + i) * kernel + k];
        for (std::size_t j = 0; j < B; ++j) acc[r][j] = std::fma(wk, src[j], acc[r][j]);
      }
    }
  }
  for (std::size_t r = 0; r < C; ++r) std::copy(acc[r], acc[r] + B, out.channel(c + r).data() + t0);
}

void conv_tile_n(const double* xp, std::size_t row, const double* weight, const double* bias, std::size_t in_channels,
                 std::size_t kernel, std::size_t dilation, std::size_t c, std::size_t rows, std::size_t n, Tensor2D& out,
                 std::size_t t0) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc[kBlock];
    for (std::size_t j = 0; j < n; ++j) acc[j] = bias[c + r];
    for (std::size_t i = 0; i < in_channels; ++i) {
      for (std::size_t k = 0; k < kernel; ++k) {
        const double* src = xp + i * row + k * dilation;
        const double wk = weight[((c + r) * in_channels + i) * kernel + k];
        for (std::size_t j = 0; j < n; ++j) acc[j] = std::fma(wk, src[j], acc[j]);
      }
    }
    std::copy(acc, acc + n, out.channel(c + r).data() + t0);
  }
}

// Rows of `x` with `pad` zeros on both sides, concatenated.
std::vector<double> padded_rows(const Tensor2D& x, std::size_t pad) {
  const std::size_t T = x.time();
  const std::size_t row = T + 2 * pad;
  std::vector<double> out(x.channels() * row, 0.0);
  for (std::size_t i = 0; i < x.channels(); ++i) {
    const auto src = x.channel(i);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(i * row + pad));
  }
  return out;
}

double lane_sum(const double* a, std::size_t n) {
  double lanes[kLanes] = {};
  std::size_t t = 0;
  for (; t + kLanes <= n; t += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) lanes[j] += a[t + j];
  }
  for (std::size_t j = 0; t < n; ++t, ++j) lanes[j] += a[t];
  double sum = 0.0;
  for (double v : lanes) sum += v;
  return sum;
}

// Same-length conv over rows that already carry (kernel / 2) * dilation
// zeros on each side. Per output element the taps are fused-multiply-added
// in (i, k) order starting from the bias, with padding read as 0.0: the same
// sequence of roundings as a plain quadruple loop.
Tensor2D conv1d_forward_padded(std::span<const double> xp, std::size_t row, std::size_t T,
                               std::span<const double> weight, std::span<const double> bias,
                               std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                               std::size_t dilation) {
  Tensor2D out(out_channels, T);
  std::size_t c = 0;
  for (; c + kTile <= out_channels; c += kTile) {
    for (std::size_t t0 = 0; t0 < T; t0 += kBlock) {
      const std::size_t n = std::min(kBlock, T - t0);
      if (n == kBlock) {
        conv_tile<kTile, kBlock>(xp.data() + t0, row, weight.data(), bias.data(), in_channels, kernel, dilation, c, out, t0);
      } else {
        conv_tile_n(xp.data() + t0, row, weight.data(), bias.data(), in_channels, kernel, dilation, c, kTile, n, out, t0);
      }
    }
  }
  for (; c < out_channels; ++c) {
    for (std::size_t t0 = 0; t0 < T; t0 += kBlock) {
      const std::size_t n = std::min(kBlock, T - t0);
      conv_tile_n(xp.data() + t0, row, weight.data(), bias.data(), in_channels, kernel, dilation, c, 1, n, out, t0);
    }
  }
  return out;
}

// dW[c,i,k] += sum_t dy[c,t] * xpad[i, t + k*dilation]. Each sum is split
// over kLanes fixed lanes (t mod kLanes) folded in lane order, so the value
// does not depend on tiling or vector width.
template <std::size_t R, std::size_t K>
void weight_gradient_tile(const Tensor2D& dy, const double* x, std::size_t c0, std::size_t i, std::size_t in_channels,
                          std::size_t dilation, std::span<double> dw) {
  const std::size_t T = dy.time();
  const std::size_t full = T - T % kLanes;
  double l[R][K][kLanes] = {};
  const double* gy[R];
  for (std::size_t r = 0; r < R; ++r) gy[r] = dy.channel(c0 + r).data();
  for (std::size_t t = 0; t < full; t += kLanes) {
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t k = 0; k < K; ++k) {
        const double* xs = x + k * dilation + t;
        for (std::size_t j = 0; j < kLanes; ++j) l[r][k][j] = std::fma(gy[r][t + j], xs[j], l[r][k][j]);
      }
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) {
      const double* xs = x + k * dilation;
      for (std::size_t t = full, j = 0; t < T; ++t, ++j) l[r][k][j] = std::fma(gy[r][t], xs[t], l[r][k][j]);
      double sum = 0.0;
      for (std::size_t j = 0; j < kLanes; ++j) sum += l[r][k][j];
      dw[((c0 + r) * in_channels + i) * K + k] += sum;
    }
  }
}

template <std::size_t K>
void weight_gradient_k(const Tensor2D& dy, const std::vector<double>& xp, std::size_t row, const ConvGeometry& g,
                       std::size_t dilation, std::span<double> dw) {
  std::size_t c = 0;
  for (; c + kTile <= g.out_channels; c += kTile) {
    for (std::size_t i = 0; i < g.in_channels; ++i) {
      weight_gradient_tile<kTile, K>(dy, xp.data() + i * row, c, i, g.in_channels, dilation, dw);
    }
  }
  for (; c < g.out_channels; ++c) {
    for (std::size_t i = 0; i < g.in_channels; ++i) {
      weight_gradient_tile<1, K>(dy, xp.data() + i * row, c, i, g.in_channels, dilation, dw);
    }
  }
}

void weight_gradient_any(const Tensor2D& dy, const std::vector<double>& xp, std::size_t row, const ConvGeometry& g,
                         std::size_t dilation, std::span<double> dw) {
  const std::size_t T = dy.time();
  const std::size_t full = T - T % kLanes;
  for (std::size_t c = 0; c < g.out_channels; ++c) {
    const double* gy = dy.channel(c).data();
    for (std::size_t i = 0; i < g.in_channels; ++i) {
      for (std::size_t k = 0; k < g.kernel; ++k) {
        const double* xs = xp.data() + i * row + k * dilation;
        double l[kLanes] = {};
        for (std::size_t t = 0; t < full; t += kLanes) {
          for (std::size_t j = 0; j < kLanes; ++j) l[j] = std::fma(gy[t + j], xs[t + j], l[j]);
        }
        for (std::size_t t = full, j = 0; t < T; ++t, ++j) l[j] = std::fma(gy[t], xs[t], l[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < kLanes; ++j) sum += l[j];
        dw[(c * g.in_channels + i) * g.kernel + k] += sum;
      }
    }
  }
}

void weight_gradient(const Tensor2D& dy, const std::vector<double>& xp, std::size_t row, const ConvGeometry& g,
                     std::size_t dilation, std::span<double> dw) {
  switch (g.kernel) {
    case 1: return weight_gradient_k<1>(dy, xp, row, g, dilation, dw);
    case 3: return weight_gradient_k<3>(dy, xp, row, g, dilation, dw);
    case 5: return weight_gradient_k<5>(dy, xp, row, g, dilation, dw);
    default: return weight_gradient_any(dy, xp, row, g, dilation, dw);
  }
}

}  // namespace

Tensor2D conv1d_forward(const Tensor2D& input, std::span<const double> weight,
                        std::span<const double> bias, std::size_t out_channels,
                        std::size_t kernel, std::size_t dilation) {
  const std::size_t pad = (kernel / 2) * dilation;
  const std::vector<double> xp = padded_rows(input, pad);
  return conv1d_forward_padded(xp, input.time() + 2 * pad, input.time(), weight, bias, input.channels(), out_channels,
                               kernel, dilation);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double smooth_l1(double residual) {
  const double a = std::abs(residual);
  return a < 1.0 ? 0.5 * residual * residual : a - 0.5;
}

Var conv1d_dilated(Tape& tape, Var input, const ParamTensor& weight, const ParamTensor& bias,
                   std::size_t dilation) {
  if (dilation == 0) throw ShapeError("conv dilation must be >= 1");
  const Tensor2D& x = tape.value(input);
  const ConvGeometry g = conv_geometry(x, weight, bias);
  Tensor2D out = conv1d_forward(x, weight.values, bias.values, g.out_channels, g.kernel, dilation);
  const ParamTensor* w_ptr = &weight;
  const ParamTensor* b_ptr = &bias;
  return tape.record(
      std::move(out), true,
      [input, w_ptr, b_ptr, g, dilation](Tape& tp, std::size_t self) {
        const Tensor2D& dy = tp.grad(Var{self});
        const Tensor2D& xv = tp.value(input);
        const std::size_t T = xv.time();
        const std::size_t pad = (g.kernel / 2) * dilation;
        const std::size_t row = T + 2 * pad;
        auto dw = tp.param_grad(*w_ptr);
        auto db = tp.param_grad(*b_ptr);
        const std::vector<double> xp = padded_rows(xv, pad);
        for (std::size_t c = 0; c < g.out_channels; ++c) db[c] += lane_sum(dy.channel(c).data(), T);
        weight_gradient(dy, xp, row, g, dilation, dw);
        if (!tp.requires_grad(input)) return;
        // dX is the padded dY convolved with the transposed, flipped kernel.
        const std::vector<double> gp = padded_rows(dy, pad);
        const std::vector<double>& w = w_ptr->values;
        std::vector<double> wt(w.size());
        for (std::size_t c = 0; c < g.out_channels; ++c) {
          for (std::size_t i = 0; i < g.in_channels; ++i) {
            for (std::size_t k = 0; k < g.kernel; ++k) {
              wt[(i * g.out_channels + c) * g.kernel + (g.kernel - 1 - k)] = w[(c * g.in_channels + i) * g.kernel + k];
            }
          }
        }
        const std::vector<double> zeros(g.in_channels, 0.0);
        const Tensor2D back = conv1d_forward_padded(gp, row, T, wt, zeros, g.out_channels, g.in_channels, g.kernel, dilation);
        Tensor2D& dx = tp.grad_buffer(input.id);
        auto dxv = dx.values();
        const auto bv = back.values();
        for (std::size_t j = 0; j < dxv.size(); ++j) dxv[j] += bv[j];
      },
      "conv1d_dilated");
}

Var relu(Tape& tape, Var input) {
  Tensor2D out = tape.value(input);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return tape.record(
      std::move(out), tape.requires_grad(input),
      [input](Tape& tp, std::size_t self) {
        const auto dy = tp.grad(Var{self}).values();
        const auto x = tp.value(input).values();
        auto dx = tp.grad_buffer(input.id).values();
        for (std::size_t j = 0; j < dy.size(); ++j) {
          if (x[j] > 0.0) dx[j] += dy[j];
        }
      },
      "relu");
}

Var sigmoid(Tape& tape, Var input) {
  Tensor2D out = tape.value(input);
  for (double& v : out.values()) v = sigmoid(v);
  return tape.record(
      std::move(out), tape.requires_grad(input),
      [input](Tape& tp, std::size_t self) {
        const auto dy = tp.grad(Var{self}).values();
        const auto y = tp.value(Var{self}).values();
        auto dx = tp.grad_buffer(input.id).values();
        for (std::size_t j = 0; j < dy.size(); ++j) dx[j] += dy[j] * y[j] * (1.0 - y[j]);
      },
      "sigmoid");
}

Var add(Tape& tape, Var a, Var b) {
  const Tensor2D& av = tape.value(a);
  const Tensor2D& bv = tape.value(b);
  require_same_shape(av, bv, "add");
  Tensor2D out = av;
  auto o = out.values();
  const auto bb = bv.values();
  for (std::size_t j = 0; j < o.size(); ++j) o[j] += bb[j];
  return tape.record(
      std::move(out), tape.requires_grad(a) || tape.requires_grad(b),
      [a, b](Tape& tp, std::size_t self) {
        for (Var v : {a, b}) {
          if (!tp.requires_grad(v)) continue;
          const auto dy = tp.grad(Var{self}).values();
          auto dx = tp.grad_buffer(v.id).values();
          for (std::size_t j = 0; j < dy.size(); ++j) dx[j] += dy[j];
        }
      },
      "add");
}

Var average(Tape& tape, std::span<const Var> inputs) {
  if (inputs.empty()) throw ShapeError("average of an empty list");
  const Tensor2D& first = tape.value(inputs[0]);
  bool needs_grad = false;
  for (Var v : inputs) {
    require_same_shape(first, tape.value(v), "average");
    needs_grad = needs_grad || tape.requires_grad(v);
  }
  const double n = static_cast<double>(inputs.size());
  Tensor2D out(first.channels(), first.time());
  auto o = out.values();
  for (Var v : inputs) {
    const auto x = tape.value(v).values();
    for (std::size_t j = 0; j < o.size(); ++j) o[j] += x[j];
  }
  for (double& v : o) v /= n;
  std::vector<Var> ins(inputs.begin(), inputs.end());
  return tape.record(
      std::move(out), needs_grad,
      [ins, n](Tape& tp, std::size_t self) {
        for (Var v : ins) {
          if (!tp.requires_grad(v)) continue;
          const auto dy = tp.grad(Var{self}).values();
          auto dx = tp.grad_buffer(v.id).values();
          for (std::size_t j = 0; j < dy.size(); ++j) dx[j] += dy[j] / n;
        }
      },
      "average");
}

Var scale(Tape& tape, Var input, double factor) {
  Tensor2D out = tape.value(input);
  for (double& v : out.values()) v *= factor;
  return tape.record(
      std::move(out), tape.requires_grad(input),
      [input, factor](Tape& tp, std::size_t self) {
        const auto dy = tp.grad(Var{self}).values();
        auto dx = tp.grad_buffer(input.id).values();
        for (std::size_t j = 0; j < dy.size(); ++j) dx[j] += dy[j] * factor;
      },
      "scale");
}

Var slice_time(Tape& tape, Var input, std::size_t begin, std::size_t end) {
  Tensor2D out = tape.value(input).slice_time(begin, end);
  return tape.record(
      std::move(out), tape.requires_grad(input),
      [input, begin, end](Tape& tp, std::size_t self) {
        const Tensor2D& dy = tp.grad(Var{self});
        Tensor2D& dx = tp.grad_buffer(input.id);
        for (std::size_t c = 0; c < dy.channels(); ++c) {
          for (std::size_t t = begin; t < end; ++t) dx(c, t) += dy(c, t - begin);
        }
      },
      "slice_time");
}

Var sum(Tape& tape, Var input) {
  double s = 0.0;
  for (double v : tape.value(input).values()) s += v;
  return tape.record(
      Tensor2D(1, 1, s), tape.requires_grad(input),
      [input](Tape& tp, std::size_t self) {
        const double dy = tp.grad(Var{self}).values()[0];
        for (double& d : tp.grad_buffer(input.id).values()) d += dy;
      },
      "sum");
}

Var fully_connected(Tape& tape, Var input, const ParamTensor& weight, const ParamTensor& bias) {
  const Tensor2D& x = tape.value(input);
  if (weight.shape.size() != 2) throw ShapeError("fc weight '" + weight.name + "' must have rank 2 [m, n]");
  const std::size_t m = weight.shape[0];
  const std::size_t n = weight.shape[1];
  if (x.channels() != n) {
    throw ShapeError("fc '" + weight.name + "' expects input length " + std::to_string(n) + ", got " +
                     x.shape_string());
  }
  if (bias.size() != m) throw ShapeError("fc bias '" + bias.name + "' must have " + std::to_string(m) + " values");
  const std::size_t batch = x.time();
  Tensor2D out(m, batch);
  for (std::size_t r = 0; r < m; ++r) {
    double* o = out.channel(r).data();
    std::fill(o, o + batch, bias.values[r]);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weight.values[r * n + j];
      const double* xr = x.channel(j).data();
      for (std::size_t b = 0; b < batch; ++b) o[b] += w * xr[b];
    }
  }
  const ParamTensor* w_ptr = &weight;
  const ParamTensor* b_ptr = &bias;
  return tape.record(
      std::move(out), true,
      [input, w_ptr, b_ptr, m, n](Tape& tp, std::size_t self) {
        const Tensor2D& dy = tp.grad(Var{self});
        const Tensor2D& xv = tp.value(input);
        const std::size_t batch = xv.time();
        auto dw = tp.param_grad(*w_ptr);
        auto db = tp.param_grad(*b_ptr);
        const bool need_dx = tp.requires_grad(input);
        Tensor2D* dx = need_dx ? &tp.grad_buffer(input.id) : nullptr;
        for (std::size_t r = 0; r < m; ++r) {
          const double* gy = dy.channel(r).data();
          double bsum = 0.0;
          for (std::size_t b = 0; b < batch; ++b) bsum += gy[b];
          db[r] += bsum;
          for (std::size_t j = 0; j < n; ++j) {
            const double* xr = xv.channel(j).data();
            double acc = 0.0;
            for (std::size_t b = 0; b < batch; ++b) acc += gy[b] * xr[b];
            dw[r * n + j] += acc;
            if (need_dx) {
              const double w = w_ptr->values[r * n + j];
              double* dxr = dx->channel(j).data();
              for (std::size_t b = 0; b < batch; ++b) dxr[b] += w * gy[b];
            }
          }
        }
      },
      "fully_connected");
}

Var binary_cross_entropy(Tape& tape, Var probabilities, const Tensor2D& targets) {
  const Tensor2D& p = tape.value(probabilities);
  if (!p.same_shape(targets)) {
    throw ShapeError("binary_cross_entropy: predictions " + p.shape_string() + " vs targets " +
                     targets.shape_string());
  }
  const auto pv = p.values();
  const auto yv = targets.values();
  double loss = 0.0;
  for (std::size_t j = 0; j < pv.size(); ++j) {
    const double q = std::clamp(pv[j], kBceClamp, 1.0 - kBceClamp);
    loss -= yv[j] * std::log(q) + (1.0 - yv[j]) * std::log(1.0 - q);
  }
  Tensor2D y = targets;
  return tape.record(
      Tensor2D(1, 1, loss), tape.requires_grad(probabilities),
      [probabilities, y = std::move(y)](Tape& tp, std::size_t self) {
        const double dl = tp.grad(Var{self}).values()[0];
        const auto pv = tp.value(probabilities).values();
        const auto yv = y.values();
        auto dp = tp.grad_buffer(probabilities.id).values();
        for (std::size_t j = 0; j < pv.size(); ++j) {
          if (pv[j] < kBceClamp || pv[j] > 1.0 - kBceClamp) continue;  // clamp is flat there
          dp[j] += dl * (-yv[j] / pv[j] + (1.0 - yv[j]) / (1.0 - pv[j]));
        }
      },
      "binary_cross_entropy");
}

Var smooth_l1_loss(Tape& tape, Var predictions, const Tensor2D& targets) {
  const Tensor2D& p = tape.value(predictions);
  if (!p.same_shape(targets)) {
    throw ShapeError("smooth_l1_loss: predictions " + p.shape_string() + " vs targets " +
                     targets.shape_string());
  }
  const auto pv = p.values();
  const auto yv = targets.values();
  double loss = 0.0;
  for (std::size_t j = 0; j < pv.size(); ++j) loss += smooth_l1(pv[j], yv[j]);
  Tensor2D y = targets;
  return tape.record(
      Tensor2D(1, 1, loss), tape.requires_grad(predictions),
      [predictions, y = std::move(y)](Tape& tp, std::size_t self) {
        const double dl = tp.grad(Var{self}).values()[0];
        const auto pv = tp.value(predictions).values();
        const auto yv = y.values();
        auto dp = tp.grad_buffer(predictions.id).values();
        for (std::size_t j = 0; j < pv.size(); ++j) {
          const double d = pv[j] - yv[j];
          const double slope = std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0);
          dp[j] += dl * slope;
        }
      },
      "smooth_l1_loss");
}

}  // namespace tsa::ad
