// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsa/autodiff.hpp"

namespace tsa::ad {

/// Stochastic gradient descent, optionally with heavy-ball momentum.
class Sgd {
 public:
  explicit Sgd(double momentum = 0.0) : momentum_(momentum) {}

  /// values -= lr * (gradient or velocity); gradients are zeroed afterwards.
  void step(ParamSet& params, double learning_rate);

  double momentum() const noexcept { return momentum_; }

 private:
  double momentum_;
  std::vector<std::vector<double>> velocity_;
};

/// Adam with bias correction.
class Adam {
 public:
  explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void step(ParamSet& params, double learning_rate);

 private:
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind parse_optimizer(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Runtime-selected optimizer.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double momentum) : kind_(kind), sgd_(momentum) {}
  void step(ParamSet& params, double learning_rate) {
    if (kind_ == OptimizerKind::kAdam) {
      adam_.step(params, learning_rate);
    } else {
      sgd_.step(params, learning_rate);
    }
  }

 private:
  OptimizerKind kind_;
  Sgd sgd_;
  Adam adam_;
};

/// Plain SGD step without optimizer state.
void sgd_step(ParamSet& params, double learning_rate);

}  // namespace tsa::ad

namespace tsa {

/// Step schedule: `initial` for epochs [0, decay_epoch), `decayed` after.
struct LearningRateSchedule {
  double initial = 1e-3;
  double decayed = 1e-4;
  std::size_t decay_epoch = 10;

  double at(std::size_t epoch) const noexcept { return epoch < decay_epoch ? initial : decayed; }
};

}  // namespace tsa
