// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/labeling.hpp"

#include <algorithm>
#include <cmath>

#include "tsa/error.hpp"

namespace tsa {

namespace {

// Tolerance applied before ceil so that products such as 0.1 * 30
// (= 3.0000000000000004) do not widen a region by a whole snippet.
constexpr double kRoundingSlack = 1e-9;

void mark(std::vector<std::uint8_t>& seq, double point, double radius) {
  const auto T = static_cast<std::ptrdiff_t>(seq.size());
  const std::ptrdiff_t center = round_half_up(point);
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(radius - kRoundingSlack));
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(center - std::max<std::ptrdiff_t>(reach, 0), 0);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(center + std::max<std::ptrdiff_t>(reach, 0), T - 1);
  for (std::ptrdiff_t t = lo; t <= hi; ++t) seq[static_cast<std::size_t>(t)] = 1;
}

}  // namespace

void AnnotationSet::validate() const {
  if (length == 0) throw DataError("video '" + video_id + "' has zero length");
  for (const auto& inst : instances) {
    if (!(inst.start >= 0.0 && inst.start < inst.end && inst.end < static_cast<double>(length))) {
      throw DataError("video '" + video_id + "': instance [" + std::to_string(inst.start) + ", " +
                      std::to_string(inst.end) + "] violates 0 <= start < end < T=" + std::to_string(length));
    }
    if (inst.class_id < 0) throw DataError("video '" + video_id + "': negative class id");
  }
}

ad::Tensor2D LabelTriple::to_tensor() const {
  const std::size_t T = length();
  ad::Tensor2D out(3, T);
  for (std::size_t t = 0; t < T; ++t) {
    out(0, t) = start[t];
    out(1, t) = mid[t];
    out(2, t) = end[t];
  }
  return out;
}

double midpoint(double start, double end) {
  if (!(start < end)) {
    throw DataError("midpoint needs start < end, got (" + std::to_string(start) + ", " + std::to_string(end) + ")");
  }
  return (start + end) / 2.0;
}

std::ptrdiff_t round_half_up(double x) { return static_cast<std::ptrdiff_t>(std::floor(x + 0.5)); }

LabelTriple inflate_labels(const AnnotationSet& annotations, double delta) {
  if (!(delta >= 0.0)) throw ConfigError("label inflation delta must be >= 0");
  annotations.validate();
  LabelTriple y;
  y.delta = delta;
  y.start.assign(annotations.length, 0);
  y.mid.assign(annotations.length, 0);
  y.end.assign(annotations.length, 0);
  for (const auto& inst : annotations.instances) {
    const double radius = delta * inst.duration();
    mark(y.start, inst.start, radius);
    mark(y.mid, midpoint(inst.start, inst.end), radius);
    mark(y.end, inst.end, radius);
  }
  return y;
}

}  // namespace tsa
