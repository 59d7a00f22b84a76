// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tsa/tensor.hpp"

namespace tsa {

/// One annotated action instance, in snippet units. Times may be fractional
/// (seconds converted to snippets); they are rounded only when labelling.
struct Instance {
  double start = 0.0;
  double end = 0.0;
  int class_id = 0;

  double duration() const noexcept { return end - start; }
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Ground truth of one video.
struct AnnotationSet {
  std::string video_id;
  std::size_t length = 0;  // T, in snippets
  std::uint32_t stride = 1;  // frames per snippet
  std::vector<Instance> instances;

  /// Enforces 0 <= start < end < T for every instance.
  void validate() const;
  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

/// Inflated binary targets Y^(s), Y^(i), Y^(e).
struct LabelTriple {
  std::vector<std::uint8_t> start;
  std::vector<std::uint8_t> mid;
  std::vector<std::uint8_t> end;
  double delta = 0.1;

  std::size_t length() const noexcept { return start.size(); }
  /// 3 x T tensor with rows (start, mid, end).
  ad::Tensor2D to_tensor() const;
};

inline constexpr double kDefaultInflation = 0.1;

/// (start + end) / 2; rejects start >= end.
double midpoint(double start, double end);

/// Round half up: 5.5 -> 6, 0.5 -> 1.
std::ptrdiff_t round_half_up(double x);

/// For each instance of duration L, rounds its start, mid and end points half
/// up to snippet indices t and marks [t - delta * L, t + delta * L] in the
/// matching sequence, endpoints rounded outward (floor / ceil) and clipped to
/// [0, T - 1]. Regions of different instances are unioned.
LabelTriple inflate_labels(const AnnotationSet& annotations, double delta = kDefaultInflation);

// Annotation file --------------------------------------------------------------
//
// Line-oriented text, one video per record:
//
//   <video_id> <T> <stride> [<start> <end> <class_id>]...
//
// Fields are whitespace separated; start/end may be fractional snippet times.
// A '#' starts a comment running to the end of the line; blank lines are
// ignored.

std::vector<AnnotationSet> read_annotation_file(const std::string& path);
std::vector<AnnotationSet> parse_annotations(const std::string& text);
void write_annotation_file(const std::string& path, const std::vector<AnnotationSet>& videos);
std::string format_annotations(const std::vector<AnnotationSet>& videos);

}  // namespace tsa
