// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/mdc_network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tsa/error.hpp"
#include "tsa/ops.hpp"

namespace tsa {

namespace {

ConvLayer add_conv(ad::ParamSet& params, const std::string& prefix, std::size_t in_channels,
                   std::size_t out_channels, std::size_t kernel, std::size_t dilation) {
  ConvLayer layer;
  layer.weight = params.add(prefix + ".weight", {out_channels, in_channels, kernel});
  layer.bias = params.add(prefix + ".bias", {out_channels});
  layer.dilation = dilation;
  return layer;
}

// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void MdcBlockConfig::validate() const {
  if (kernel_size == 0 || kernel_size % 2 == 0) {
    throw ConfigError("MDC kernel size must be odd and positive, got " + std::to_string(kernel_size));
  }
  if (channels == 0) throw ConfigError("MDC channel count must be positive");
  if (dilations[0] == 0) throw ConfigError("MDC dilations must be positive");
  if (!(dilations[0] < dilations[1] && dilations[1] < dilations[2])) {
    throw ConfigError("MDC dilations must satisfy d1 < d2 < d3");
  }
}

DetectorConfig DetectorConfig::with_width(std::size_t input_dim, std::size_t width) {
  DetectorConfig cfg;
  cfg.input_dim = input_dim;
  for (auto& s : cfg.shared_conv) s.channels = width;
  for (auto& b : cfg.branches) b.block.channels = width;
  cfg.head_conv.front().channels = width;
  return cfg;
}

void DetectorConfig::validate() const {
  if (input_dim == 0) throw ConfigError("detector input_dim must be positive");
  auto check_conv = [](const ConvSpec& s, const char* where) {
    if (s.channels == 0 || s.kernel == 0 || s.kernel % 2 == 0) {
      throw ConfigError(std::string(where) + " conv needs positive channels and an odd kernel");
    }
  };
  for (const auto& s : shared_conv) check_conv(s, "shared");
  for (const auto& s : head_conv) check_conv(s, "head");
  if (branches.empty()) throw ConfigError("detector needs at least one branch");
  const std::size_t width = shared_conv.empty() ? input_dim : shared_conv.back().channels;
  for (const auto& b : branches) {
    b.block.validate();
    if (b.depth == 0) throw ConfigError("branch depth must be >= 1");
    if (b.block.channels != width) {
      throw ConfigError("branch channels (" + std::to_string(b.block.channels) +
                        ") must equal the shared stack output width (" + std::to_string(width) + ")");
    }
  }
  if (head_conv.empty() || head_conv.back().channels != 3) {
    throw ConfigError("detector head must end in exactly 3 channels");
  }
}

std::string DetectorConfig::canonical() const {
  std::ostringstream os;
  os << "in=" << input_dim << ";shared=";
  for (const auto& s : shared_conv) os << s.channels << ':' << s.kernel << ',';
  os << ";branches=";
  for (const auto& b : branches) {
    os << b.block.dilations[0] << '-' << b.block.dilations[1] << '-' << b.block.dilations[2] << 'k'
       << b.block.kernel_size << 'c' << b.block.channels << 'x' << b.depth << ',';
  }
  os << ";head=";
  for (const auto& s : head_conv) os << s.channels << ':' << s.kernel << ',';
  return os.str();
}

std::uint64_t DetectorConfig::digest() const { return fnv1a(canonical()); }

std::size_t DetectorConfig::context_radius() const {
  std::size_t widest = 0;
  for (const auto& b : branches) widest = std::max(widest, receptive_field(b).mdc_stack);
  std::size_t span = widest - 1;
  for (const auto& c : shared_conv) span += c.kernel - 1;
  for (const auto& c : head_conv) span += c.kernel - 1;
  return span / 2;
}

ProbabilityTriple ProbabilityTriple::from_tensor(const ad::Tensor2D& probs) {
  if (probs.channels() != 3) throw ShapeError("probability tensor must have 3 rows, got " + probs.shape_string());
  ProbabilityTriple out;
  auto copy = [&](std::size_t c) {
    auto row = probs.channel(c);
    return std::vector<double>(row.begin(), row.end());
  };
  out.start = copy(0);
  out.mid = copy(1);
  out.end = copy(2);
  return out;
}

ReceptiveField receptive_field(const BranchConfig& branch, std::span<const std::size_t> shared_kernels) {
  ReceptiveField rf;
  rf.mdc_stack = 1 + branch.depth * (branch.block.kernel_size - 1) * branch.block.dilations[2];
  for (std::size_t k : shared_kernels) rf.shared_extension += k - 1;
  return rf;
}

MdcBlockLayers add_mdc_block_params(ad::ParamSet& params, const MdcBlockConfig& config,
                                    const std::string& prefix) {
  MdcBlockLayers layers;
  for (std::size_t j = 0; j < 3; ++j) {
    layers.convs[j] = add_conv(params, prefix + ".conv" + std::to_string(j), config.channels,
                               config.channels, config.kernel_size, config.dilations[j]);
  }
  return layers;
}

ad::Var mdc_block_forward(ad::Tape& tape, ad::Var input, const MdcBlockConfig& config,
                          const ad::ParamSet& params, const MdcBlockLayers& layers) {
  if (tape.value(input).channels() != config.channels) {
    throw ShapeError("MDC block expects " + std::to_string(config.channels) + " channels, got " +
                     tape.value(input).shape_string());
  }
  std::array<ad::Var, 3> paths;
  for (std::size_t j = 0; j < 3; ++j) {
    const ConvLayer& c = layers.convs[j];
    paths[j] = ad::relu(tape, ad::conv1d_dilated(tape, input, params[c.weight], params[c.bias], c.dilation));
  }
  ad::Var fused = ad::average(tape, paths);
  return ad::relu(tape, ad::add(tape, input, fused));
}

void glorot_initialize(ad::ParamSet& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& p : params) {
    if (p.shape.size() < 2) {
      std::fill(p.values.begin(), p.values.end(), 0.0);
      continue;
    }
    std::size_t receptive = 1;
    for (std::size_t d = 2; d < p.shape.size(); ++d) receptive *= p.shape[d];
    const double fan_out = static_cast<double>(p.shape[0] * receptive);
    const double fan_in = static_cast<double>(p.shape[1] * receptive);
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (double& v : p.values) v = dist(rng);
  }
}

Detector::Detector(DetectorConfig config) : config_(std::move(config)) {
  config_.validate();
  std::size_t channels = config_.input_dim;
  for (std::size_t i = 0; i < config_.shared_conv.size(); ++i) {
    const auto& s = config_.shared_conv[i];
    shared_.push_back(add_conv(params_, "shared." + std::to_string(i), channels, s.channels, s.kernel, 1));
    channels = s.channels;
  }
  for (std::size_t b = 0; b < config_.branches.size(); ++b) {
    const auto& branch = config_.branches[b];
    std::vector<MdcBlockLayers> blocks;
    for (std::size_t d = 0; d < branch.depth; ++d) {
      blocks.push_back(add_mdc_block_params(
          params_, branch.block, "branch" + std::to_string(b) + ".block" + std::to_string(d)));
    }
    branches_.push_back(std::move(blocks));
  }
  for (std::size_t i = 0; i < config_.head_conv.size(); ++i) {
    const auto& s = config_.head_conv[i];
    head_.push_back(add_conv(params_, "head." + std::to_string(i), channels, s.channels, s.kernel, 1));
    channels = s.channels;
  }
}

ad::Var Detector::conv_relu(ad::Tape& tape, ad::Var x, const ConvLayer& layer) const {
  return ad::relu(tape, ad::conv1d_dilated(tape, x, params_[layer.weight], params_[layer.bias], layer.dilation));
}

ad::Var Detector::forward(ad::Tape& tape, ad::Var features) const {
  if (tape.value(features).channels() != config_.input_dim) {
    throw ShapeError("detector expects feature dim " + std::to_string(config_.input_dim) + ", got " +
                     tape.value(features).shape_string());
  }
  ad::Var x = features;
  for (const auto& layer : shared_) x = conv_relu(tape, x, layer);

  std::vector<ad::Var> outs;
  outs.reserve(branches_.size());
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    ad::Var y = x;
    for (const auto& block : branches_[b]) {
      y = mdc_block_forward(tape, y, config_.branches[b].block, params_, block);
    }
    outs.push_back(y);
  }
  ad::Var h = ad::average(tape, outs);

  for (std::size_t i = 0; i + 1 < head_.size(); ++i) h = conv_relu(tape, h, head_[i]);
  const ConvLayer& last = head_.back();
  h = ad::conv1d_dilated(tape, h, params_[last.weight], params_[last.bias], last.dilation);
  return ad::sigmoid(tape, h);
}

ProbabilityTriple detector_forward(const ad::Tensor2D& features, const Detector& detector) {
  ad::Tape tape;
  ad::Var x = tape.input(features);
  return ProbabilityTriple::from_tensor(tape.value(detector.forward(tape, x)));
}

}  // namespace tsa
