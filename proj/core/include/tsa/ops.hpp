// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "tsa/autodiff.hpp"
#include "tsa/tensor.hpp"

namespace tsa::ad {

/// Lower clamp applied to probabilities before taking logs in the BCE loss.
inline constexpr double kBceClamp = 1e-12;

// Plain kernels ------------------------------------------------------------

/// Same-padded dilated 1-D convolution.
///
/// weight holds C_out x C_in x K values, bias C_out values. For every output
/// element the sum runs over input channel i (outer) then tap k (inner),
/// starting from the bias:
///
///   out[c,t] = b[c] + sum_i sum_k w[c,i,k] * x[i, t + (k - (K-1)/2) * dilation]
///
/// with zeros outside [0, T). Padded taps are still accumulated (as w * 0.0)
/// so results match a naive loop bit for bit.
Tensor2D conv1d_forward(const Tensor2D& input, std::span<const double> weight,
                        std::span<const double> bias, std::size_t out_channels,
                        std::size_t kernel, std::size_t dilation);

/// Numerically stable logistic function.
double sigmoid(double x);
/// Smooth L1 (Huber with beta = 1) of a residual.
double smooth_l1(double residual);
/// Same with (prediction, target).
inline double smooth_l1(double prediction, double target) { return smooth_l1(prediction - target); }

// Recorded ops -------------------------------------------------------------

/// Dilated same-padded convolution. weight shape [C_out, C_in, K] with K odd,
/// bias shape [C_out].
Var conv1d_dilated(Tape& tape, Var input, const ParamTensor& weight, const ParamTensor& bias,
                   std::size_t dilation);

Var relu(Tape& tape, Var input);
Var sigmoid(Tape& tape, Var input);
Var add(Tape& tape, Var a, Var b);
/// Elementwise arithmetic mean of equally shaped tensors.
Var average(Tape& tape, std::span<const Var> inputs);
/// Multiplies every element by a constant.
Var scale(Tape& tape, Var input, double factor);
/// Columns [begin, end) of every channel.
Var slice_time(Tape& tape, Var input, std::size_t begin, std::size_t end);
/// Sum of all elements as a 1x1 node.
Var sum(Tape& tape, Var input);

/// out = W x + b for each column of x (n x batch). weight shape [m, n],
/// bias shape [m].
Var fully_connected(Tape& tape, Var input, const ParamTensor& weight, const ParamTensor& bias);

/// Summed binary cross-entropy (negative log-likelihood) of probabilities P
/// against 0/1 targets Y of the same shape:
///   -sum [ Y log P + (1 - Y) log(1 - P) ],
/// with P clamped to [kBceClamp, 1 - kBceClamp] first.
Var binary_cross_entropy(Tape& tape, Var probabilities, const Tensor2D& targets);

/// Summed smooth L1 between every element of `predictions` and `targets`.
Var smooth_l1_loss(Tape& tape, Var predictions, const Tensor2D& targets);

}  // namespace tsa::ad
