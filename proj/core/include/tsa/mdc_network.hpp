// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsa/autodiff.hpp"
#include "tsa/tensor.hpp"

namespace tsa {

/// One temporal convolution layer of the shared front or the head.
struct ConvSpec {
  std::size_t channels = 128;
  std::size_t kernel = 3;

  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

/// MDC-(d1,d2,d3): three parallel dilated convolutions with one kernel size.
struct MdcBlockConfig {
  std::array<std::size_t, 3> dilations{1, 2, 3};
  std::size_t kernel_size = 3;
  std::size_t channels = 128;

  /// Checks d1 < d2 < d3, odd kernel and positive sizes.
  void validate() const;

  friend bool operator==(const MdcBlockConfig&, const MdcBlockConfig&) = default;
};

/// A stack of `depth` MDC blocks sharing one dilation triple.
struct BranchConfig {
  MdcBlockConfig block;
  std::size_t depth = 2;

  friend bool operator==(const BranchConfig&, const BranchConfig&) = default;
};

struct DetectorConfig {
  std::size_t input_dim = 16;
  std::vector<ConvSpec> shared_conv{{128, 3}, {128, 3}};
  std::vector<BranchConfig> branches{
      {{{1, 2, 3}, 3, 128}, 2},
      {{{1, 3, 5}, 3, 128}, 2},
      {{{1, 5, 7}, 3, 128}, 2},
  };
  std::vector<ConvSpec> head_conv{{128, 3}, {3, 1}};

  /// Same architecture with every hidden width set to `width`.
  static DetectorConfig with_width(std::size_t input_dim, std::size_t width);

  void validate() const;
  /// Stable textual form of the architecture; the checkpoint digest hashes it.
  std::string canonical() const;
  std::uint64_t digest() const;
  /// Snippets on either side of t that can influence the outputs at t.
  std::size_t context_radius() const;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// The three critical-point probability sequences P^(s), P^(i), P^(e).
struct ProbabilityTriple {
  std::vector<double> start;
  std::vector<double> mid;
  std::vector<double> end;

  std::size_t length() const noexcept { return start.size(); }
  /// Splits a 3 x T tensor (rows start, mid, end).
  static ProbabilityTriple from_tensor(const ad::Tensor2D& probs);
};

/// Receptive field of one branch, in snippets.
struct ReceptiveField {
  std::size_t mdc_stack = 1;         // 1 + depth * (K - 1) * d3
  std::size_t shared_extension = 0;  // sum of (k_i - 1) over the extra convs passed in

  std::size_t total() const noexcept { return mdc_stack + shared_extension; }
};

ReceptiveField receptive_field(const BranchConfig& branch, std::span<const std::size_t> shared_kernels = {});

/// Parameter indices of one convolution inside a ParamSet.
struct ConvLayer {
  std::size_t weight = 0;
  std::size_t bias = 0;
  std::size_t dilation = 1;
};

struct MdcBlockLayers {
  std::array<ConvLayer, 3> convs;
};

/// relu(x + mean_j relu(conv_{d_j}(x))).
ad::Var mdc_block_forward(ad::Tape& tape, ad::Var input, const MdcBlockConfig& config,
                          const ad::ParamSet& params, const MdcBlockLayers& layers);

/// Adds the three conv layers of one MDC block to `params` (zero-valued).
MdcBlockLayers add_mdc_block_params(ad::ParamSet& params, const MdcBlockConfig& config,
                                    const std::string& prefix);

/// Uniform Glorot initialisation of every rank-3 / rank-2 weight; biases zero.
void glorot_initialize(ad::ParamSet& params, std::uint64_t seed);

/// Critical-point detector: shared convs, multi-branch stacked MDC blocks,
/// average over branches, conv head and a sigmoid per output channel.
///
/// Trained parameters are read-only during forward passes, so one Detector
/// can serve concurrent inference calls.
class Detector {
 public:
  explicit Detector(DetectorConfig config);

  const DetectorConfig& config() const noexcept { return config_; }
  ad::ParamSet& params() noexcept { return params_; }
  const ad::ParamSet& params() const noexcept { return params_; }

  void initialize(std::uint64_t seed) { glorot_initialize(params_, seed); }

  /// Records the forward pass; returns the 3 x T sigmoid output.
  ad::Var forward(ad::Tape& tape, ad::Var features) const;

 private:
  ad::Var conv_relu(ad::Tape& tape, ad::Var x, const ConvLayer& layer) const;

  DetectorConfig config_;
  ad::ParamSet params_;
  std::vector<ConvLayer> shared_;
  std::vector<std::vector<MdcBlockLayers>> branches_;
  std::vector<ConvLayer> head_;
};

/// Inference: features (D x T) to the three probability sequences.
ProbabilityTriple detector_forward(const ad::Tensor2D& features, const Detector& detector);

}  // namespace tsa
