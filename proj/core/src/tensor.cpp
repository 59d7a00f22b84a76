// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "tsa/error.hpp"

namespace tsa::ad {

namespace {

void check_dims(std::size_t channels, std::size_t time) {
  if (channels == 0 || time == 0) {
    throw ShapeError("tensor dimensions must be positive, got " + std::to_string(channels) + "x" +
                     std::to_string(time));
  }
}

}  // namespace

Tensor2D::Tensor2D(std::size_t channels, std::size_t time, double fill)
    : channels_(channels), time_(time) {
  check_dims(channels, time);
  values_.assign(channels * time, fill);
}

Tensor2D::Tensor2D(std::size_t channels, std::size_t time, std::vector<double> values)
    : channels_(channels), time_(time), values_(std::move(values)) {
  check_dims(channels, time);
  if (values_.size() != channels * time) {
    throw ShapeError("tensor " + shape_string() + " needs " + std::to_string(channels * time) +
                     " values, got " + std::to_string(values_.size()));
  }
}

Tensor2D Tensor2D::row(std::span<const double> values) {
  return Tensor2D(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Tensor2D Tensor2D::column(std::span<const double> values) {
  return Tensor2D(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Tensor2D Tensor2D::slice_time(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > time_) {
    throw ShapeError("slice_time: columns [" + std::to_string(begin) + ", " + std::to_string(end) + ") of " +
                     shape_string());
  }
  Tensor2D out(channels_, end - begin);
  for (std::size_t c = 0; c < channels_; ++c) {
    const auto row = channel(c);
    std::copy(row.begin() + static_cast<std::ptrdiff_t>(begin), row.begin() + static_cast<std::ptrdiff_t>(end),
              out.channel(c).begin());
  }
  return out;
}

bool Tensor2D::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor2D::shape_string() const {
  return "[" + std::to_string(channels_) + "x" + std::to_string(time_) + "]";
}

}  // namespace tsa::ad
