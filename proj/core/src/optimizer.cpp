// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/optimizer.hpp"

#include <cmath>

#include "tsa/error.hpp"

namespace tsa::ad {

void Sgd::step(ParamSet& params, double learning_rate) {
  if (momentum_ == 0.0) {
    sgd_step(params, learning_rate);
    return;
  }
  if (velocity_.size() != params.size()) {
    velocity_.clear();
    for (const auto& p : params) velocity_.emplace_back(p.size(), 0.0);
  }
  std::size_t idx = 0;
  for (auto& p : params) {
    auto& vel = velocity_[idx++];
    for (std::size_t j = 0; j < p.size(); ++j) {
      vel[j] = momentum_ * vel[j] + p.gradient[j];
      p.values[j] -= learning_rate * vel[j];
    }
    p.zero_gradient();
  }
}

void Adam::step(ParamSet& params, double learning_rate) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (const auto& p : params) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    }
  }
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  std::size_t idx = 0;
  for (auto& p : params) {
    auto& m = m_[idx];
    auto& v = v_[idx];
    ++idx;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double g = p.gradient[j];
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
      p.values[j] -= learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + epsilon_);
    }
    p.zero_gradient();
  }
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kAdam ? "adam" : "sgd"; }

void sgd_step(ParamSet& params, double learning_rate) {
  for (auto& p : params) {
    for (std::size_t j = 0; j < p.size(); ++j) p.values[j] -= learning_rate * p.gradient[j];
    p.zero_gradient();
  }
}

}  // namespace tsa::ad
