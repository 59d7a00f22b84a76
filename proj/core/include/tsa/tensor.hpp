// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tsa::ad {

/// Dense (channels x time) matrix of doubles, row-major: one row per channel.
///
/// A feature sequence F = [f_1 .. f_T] with D-dimensional snippet features is
/// stored as a D x T tensor. Column vectors (time == 1) double as the
/// vectors consumed by fully connected layers; a batch of vectors is stored
/// as n x batch.
class Tensor2D {
 public:
  Tensor2D() = default;
  Tensor2D(std::size_t channels, std::size_t time, double fill = 0.0);
  Tensor2D(std::size_t channels, std::size_t time, std::vector<double> values);

  /// Single-row tensor holding the given sequence.
  static Tensor2D row(std::span<const double> values);
  /// Single-column tensor (vector) holding the given values.
  static Tensor2D column(std::span<const double> values);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t time() const noexcept { return time_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t c, std::size_t t) { return values_[c * time_ + t]; }
  double operator()(std::size_t c, std::size_t t) const { return values_[c * time_ + t]; }

  std::span<double> channel(std::size_t c) { return {values_.data() + c * time_, time_}; }
  std::span<const double> channel(std::size_t c) const { return {values_.data() + c * time_, time_}; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const Tensor2D& other) const noexcept {
    return channels_ == other.channels_ && time_ == other.time_;
  }
  /// Columns [begin, end) of every channel.
  Tensor2D slice_time(std::size_t begin, std::size_t end) const;

  bool all_finite() const noexcept;
  std::string shape_string() const;

  friend bool operator==(const Tensor2D&, const Tensor2D&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t time_ = 0;
  std::vector<double> values_;
};

}  // namespace tsa::ad
