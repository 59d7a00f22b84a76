// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>

#include "tsa/error.hpp"
#include "tsa/proposal.hpp"

namespace tsa {

std::vector<std::size_t> select_candidates(std::span<const double> probs, double threshold) {
  std::vector<std::size_t> out;
  const std::size_t T = probs.size();
  for (std::size_t t = 0; t < T; ++t) {
    const bool above = probs[t] > threshold;
    const bool peak = t > 0 && t + 1 < T && probs[t] > probs[t - 1] && probs[t] > probs[t + 1];
    if (above || peak) out.push_back(t);
  }
  return out;
}

void PairingConfig::validate() const {
  if (!(d_min > 0.0) || !(d_min <= d_max)) {
    throw ConfigError("pairing needs 0 < d_min <= d_max");
  }
  if (!(mid_threshold >= 0.0 && mid_threshold <= 1.0)) throw ConfigError("mid threshold must be in [0, 1]");
}

std::size_t mid_index(std::size_t start, std::size_t end) {
  // round_half_up((s + e) / 2) on integers.
  return (start + end + 1) / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_candidates(const CandidatePoints& points,
                                                                 std::span<const double> mid_probs,
                                                                 const PairingConfig& cfg) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s : points.starts) {
    // ends are sorted, so skip straight to the first admissible one
    auto it = std::upper_bound(points.ends.begin(), points.ends.end(), s);
    for (; it != points.ends.end(); ++it) {
      const std::size_t e = *it;
      const auto d = static_cast<double>(e - s);
      if (d > cfg.d_max) break;
      if (d < cfg.d_min) continue;
      const std::size_t m = mid_index(s, e);
      if (m >= mid_probs.size()) throw ShapeError("pair_candidates: mid index outside the mid sequence");
      if (mid_probs[m] >= cfg.mid_threshold) out.emplace_back(s, e);
    }
  }
  return out;
}

std::pair<double, double> duration_stats(const std::vector<AnnotationSet>& training) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const auto& video : training) {
    for (const auto& inst : video.instances) {
      lo = std::min(lo, inst.duration());
      hi = std::max(hi, inst.duration());
      ++n;
    }
  }
  if (n == 0) throw DataError("duration statistics need at least one annotated instance");
  return {lo, hi};
}

void sort_by_score(std::vector<Proposal>& proposals) {
  std::stable_sort(proposals.begin(), proposals.end(), [](const Proposal& a, const Proposal& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });
}

}  // namespace tsa
