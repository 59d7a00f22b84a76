// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/autodiff.hpp"

#include <algorithm>
#include <numeric>

#include "tsa/error.hpp"

namespace tsa::ad {

ParamTensor::ParamTensor(std::string name_, std::vector<std::size_t> shape_)
    : name(std::move(name_)), shape(std::move(shape_)) {
  if (shape.empty()) throw ShapeError("parameter '" + name + "' needs a non-empty shape");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("parameter '" + name + "' has a zero dimension");
    n *= d;
  }
  values.assign(n, 0.0);
  gradient.assign(n, 0.0);
}

void ParamTensor::zero_gradient() { std::fill(gradient.begin(), gradient.end(), 0.0); }

std::size_t ParamSet::add(std::string name, std::vector<std::size_t> shape) {
  for (const auto& p : params_) {
    if (p.name == name) throw ShapeError("duplicate parameter name '" + name + "'");
  }
  params_.emplace_back(std::move(name), std::move(shape));
  return params_.size() - 1;
}

std::size_t ParamSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw ShapeError("no parameter named '" + name + "'");
}

std::size_t ParamSet::scalar_count() const noexcept {
  return std::accumulate(params_.begin(), params_.end(), std::size_t{0},
                         [](std::size_t acc, const ParamTensor& p) { return acc + p.size(); });
}

void ParamSet::zero_gradients() {
  for (auto& p : params_) p.zero_gradient();
}

Var Tape::input(Tensor2D value, bool requires_grad) {
  if (!value.all_finite()) throw NumericError("non-finite value in tape input " + value.shape_string());
  nodes_.push_back(Node{std::move(value), {}, requires_grad, nullptr, "input"});
  return Var{nodes_.size() - 1};
}

Var Tape::param(const ParamTensor& p) {
  std::size_t rows = p.shape[0];
  std::size_t cols = p.size() / rows;
  Tensor2D value(rows, cols, p.values);
  const ParamTensor* source = &p;
  return record(std::move(value), true,
                [source](Tape& tape, std::size_t self) {
                  const auto& g = tape.nodes_[self].grad.values();
                  auto dst = tape.param_grad(*source);
                  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
                },
                "param");
}

Var Tape::record(Tensor2D value, bool requires_grad, BackwardFn backward, const char* op_name) {
  if (!value.all_finite()) {
    throw NumericError(std::string("non-finite output from op '") + op_name + "' " +
                       value.shape_string());
  }
  nodes_.push_back(Node{std::move(value), {}, requires_grad, std::move(backward), op_name});
  return Var{nodes_.size() - 1};
}

const Tensor2D& Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (n.grad.empty()) {
    // Lazily materialised zero gradient for nodes the loss never reached.
    n.grad = Tensor2D(n.value.channels(), n.value.time());
  }
  return n.grad;
}

Tensor2D& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.empty()) n.grad = Tensor2D(n.value.channels(), n.value.time());
  return n.grad;
}

std::span<double> Tape::param_grad(const ParamTensor& p) {
  for (auto& pg : param_grads_) {
    if (pg.param == &p) return pg.grad;
  }
  param_grads_.push_back(ParamGrad{&p, std::vector<double>(p.size(), 0.0)});
  return param_grads_.back().grad;
}

std::span<const double> Tape::param_grad_if_any(const ParamTensor& p) const {
  for (const auto& pg : param_grads_) {
    if (pg.param == &p) return pg.grad;
  }
  return {};
}

void Tape::backward(Var loss) {
  if (backward_done_) {
    throw ConfigError("backward already ran on this graph; re-run the forward pass first");
  }
  Node& root = nodes_.at(loss.id);
  if (root.value.size() != 1) {
    throw ShapeError("backward needs a scalar loss, got " + root.value.shape_string());
  }
  backward_done_ = true;
  grad_buffer(loss.id).values()[0] = 1.0;
  visit_order_.clear();
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    visit_order_.push_back(id);
    n.backward(*this, id);
  }
}

void Tape::accumulate_gradients(ParamSet& params, double scale) const {
  for (auto& p : params) {
    auto g = param_grad_if_any(p);
    if (g.empty()) continue;
    for (std::size_t i = 0; i < g.size(); ++i) p.gradient[i] += scale * g[i];
  }
}

void backward(Tape& tape, Var loss, ParamSet& params) {
  tape.backward(loss);
  tape.accumulate_gradients(params);
}

}  // namespace tsa::ad
