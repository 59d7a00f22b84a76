// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsa/tensor.hpp"

namespace tsa::ad {

/// A learnable weight array with gradient storage of the same length.
struct ParamTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> gradient;

  ParamTensor() = default;
  ParamTensor(std::string name, std::vector<std::size_t> shape);

  std::size_t size() const noexcept { return values.size(); }
  void zero_gradient();
};

/// Ordered collection of parameters. Insertion order is the canonical order
/// for checkpoints, optimizer updates and gradient reductions.
class ParamSet {
 public:
  /// Adds a zero-initialised parameter; names must be unique.
  std::size_t add(std::string name, std::vector<std::size_t> shape);

  ParamTensor& operator[](std::size_t index) { return params_.at(index); }
  const ParamTensor& operator[](std::size_t index) const { return params_.at(index); }
  /// Index of the parameter called `name`; throws ShapeError when absent.
  std::size_t index_of(const std::string& name) const;

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t scalar_count() const noexcept;

  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }

  void zero_gradients();

 private:
  std::vector<ParamTensor> params_;
};

/// Handle to a node on a Tape.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
};

/// Reverse-mode computation record (the compute graph).
///
/// Nodes are appended in execution order, so the node list is already a
/// topological order; backward() walks it in reverse. Parameter gradients are
/// first collected in tape-local buffers. That keeps independent tapes free of
/// shared mutable state; callers fold the buffers into parameters in a fixed
/// order (see accumulate_gradients).
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  /// Constant leaf. Set `requires_grad` to read d(loss)/d(input) afterwards.
  Var input(Tensor2D value, bool requires_grad = false);
  /// Leaf mirroring a parameter (shape channels = size, time = 1 unless the
  /// parameter is rank 2). Its gradient flows back to the parameter.
  Var param(const ParamTensor& p);

  /// Appends an op node. Throws NumericError if `value` has NaN/Inf.
  Var record(Tensor2D value, bool requires_grad, BackwardFn backward, const char* op_name);

  const Tensor2D& value(Var v) const { return nodes_.at(v.id).value; }
  /// Gradient of the last backward() w.r.t. node `v`; zero if it did not flow.
  const Tensor2D& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  /// Runs the reverse pass from a 1x1 loss node. A tape can be differentiated
  /// once; build a new tape (re-run forward) for another pass.
  void backward(Var loss);
  bool backward_done() const noexcept { return backward_done_; }

  /// Mutable gradient buffer of node `id`, allocated on first use.
  Tensor2D& grad_buffer(std::size_t id);
  /// Tape-local gradient buffer for `p`, allocated on first use.
  std::span<double> param_grad(const ParamTensor& p);
  /// Tape-local gradient for `p`, or empty if `p` was never reached.
  std::span<const double> param_grad_if_any(const ParamTensor& p) const;

  /// Adds this tape's parameter gradients into `params[i].gradient`, scaled
  /// by `scale`, walking `params` in order.
  void accumulate_gradients(ParamSet& params, double scale = 1.0) const;

  /// Order in which backward visited node ids (for inspection in tests).
  const std::vector<std::size_t>& visit_order() const noexcept { return visit_order_; }

 private:
  struct Node {
    Tensor2D value;
    mutable Tensor2D grad;
    bool requires_grad = false;
    BackwardFn backward;
    const char* op = "";
  };
  struct ParamGrad {
    const ParamTensor* param;
    std::vector<double> grad;
  };

  std::vector<Node> nodes_;
  std::vector<ParamGrad> param_grads_;
  std::vector<std::size_t> visit_order_;
  bool backward_done_ = false;
};

/// Runs tape.backward(loss) and accumulates into the parameters' gradient
/// fields.
void backward(Tape& tape, Var loss, ParamSet& params);

}  // namespace tsa::ad
