// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used as test oracles. They follow
// the textbook definitions directly and share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "tsa/tensor.hpp"

namespace tsa::oracle {

/// Quadruple loop over (c, t, i, k), padded taps read as 0.0, one fused
/// multiply-add per tap.
inline ad::Tensor2D naive_conv1d(const ad::Tensor2D& x, std::span<const double> w, std::span<const double> b,
                                 std::size_t c_out, std::size_t kernel, std::size_t dilation) {
  const std::size_t c_in = x.channels();
  const auto T = static_cast<long>(x.time());
  ad::Tensor2D out(c_out, x.time());
  const long half = static_cast<long>(kernel / 2);
  for (std::size_t c = 0; c < c_out; ++c) {
    for (long t = 0; t < T; ++t) {
      double acc = b[c];
      for (std::size_t i = 0; i < c_in; ++i) {
        for (std::size_t k = 0; k < kernel; ++k) {
          const long src = t + (static_cast<long>(k) - half) * static_cast<long>(dilation);
          const double v = (src >= 0 && src < T) ? x(i, static_cast<std::size_t>(src)) : 0.0;
          acc = std::fma(w[(c * c_in + i) * kernel + k], v, acc);
        }
      }
      out(c, static_cast<std::size_t>(t)) = acc;
    }
  }
  return out;
}

/// IoU by interval arithmetic: overlap length over hull-minus-gap length.
inline double interval_iou(double a0, double a1, double b0, double b1) {
  const double lo = std::max(a0, b0);
  const double hi = std::min(a1, b1);
  const double overlap = hi > lo ? hi - lo : 0.0;
  const double total = (a1 - a0) + (b1 - b0) - overlap;
  return overlap / total;
}

struct Box {
  std::size_t start;
  std::size_t end;
  double score;
};

/// Reference greedy NMS: repeatedly scan for the best unsuppressed item.
inline std::vector<Box> brute_force_nms(std::vector<Box> items, double threshold) {
  std::vector<bool> alive(items.size(), true);
  std::vector<Box> kept;
  while (true) {
    std::size_t best = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!alive[i]) continue;
      if (best == items.size()) {
        best = i;
        continue;
      }
      const Box& a = items[i];
      const Box& b = items[best];
      const bool better = a.score > b.score || (a.score == b.score && (a.start < b.start || (a.start == b.start && a.end < b.end)));
      if (better) best = i;
    }
    if (best == items.size()) break;
    alive[best] = false;
    kept.push_back(items[best]);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (alive[i] && interval_iou(static_cast<double>(items[best].start), static_cast<double>(items[best].end),
                                   static_cast<double>(items[i].start), static_cast<double>(items[i].end)) > threshold) {
        alive[i] = false;
      }
    }
  }
  return kept;
}

/// Double loop over all (s, e) applying the three pairing gates.
inline std::set<std::pair<std::size_t, std::size_t>> brute_force_pairs(const std::vector<std::size_t>& starts,
                                                                       const std::vector<std::size_t>& ends,
                                                                       const std::vector<double>& mid, double d_min,
                                                                       double d_max, double tau) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s : starts) {
    for (std::size_t e : ends) {
      if (!(s < e)) continue;
      const double d = static_cast<double>(e) - static_cast<double>(s);
      if (d < d_min || d > d_max) continue;
      const auto m = static_cast<std::size_t>(std::floor((static_cast<double>(s) + static_cast<double>(e)) / 2.0 + 0.5));
      if (mid[m] >= tau) out.emplace(s, e);
    }
  }
  return out;
}

/// Linear interpolation of seq at real position x, clamped to the ends.
inline double lerp_at(const std::vector<double>& seq, double x) {
  const double last = static_cast<double>(seq.size()) - 1.0;
  if (x <= 0.0) return seq.front();
  if (x >= last) return seq.back();
  const double fl = std::floor(x);
  const auto i = static_cast<std::size_t>(fl);
  const double f = x - fl;
  return (1.0 - f) * seq[i] + f * seq[i + 1];
}


struct Interval {
  double start;
  double end;
};

/// Walks proposals in rank order; each claims the free ground truth of
/// largest IoU if that IoU reaches the threshold (strictly positive when
/// the threshold is 0). Returns the number of claimed ground truths.
inline std::size_t greedy_matches(const std::vector<Interval>& ranked, std::size_t top_n,
                                  const std::vector<Interval>& gt, double threshold) {
  std::vector<char> taken(gt.size(), 0);
  std::size_t count = 0;
  for (std::size_t r = 0; r < ranked.size() && r < top_n; ++r) {
    std::vector<std::pair<double, std::size_t>> options;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (!taken[g]) options.emplace_back(interval_iou(ranked[r].start, ranked[r].end, gt[g].start, gt[g].end), g);
    }
    if (options.empty()) continue;
    // largest IoU, lowest index on ties
    const auto pick = *std::min_element(options.begin(), options.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    if (pick.first > 0.0 && pick.first >= threshold) {
      taken[pick.second] = 1;
      ++count;
    }
  }
  return count;
}

/// All-points interpolated AP from the full PR curve: each true positive
/// at rank i contributes 1/positives times the best precision at any rank
/// j >= i.
inline double ap_from_pr_curve(const std::vector<bool>& hits, std::size_t positives) {
  if (positives == 0) return 0.0;
  double ap = 0.0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (!hits[i]) continue;
    double best = 0.0;
    for (std::size_t j = i; j < hits.size(); ++j) {
      const auto tp = static_cast<double>(std::count(hits.begin(), hits.begin() + static_cast<long>(j) + 1, true));
      best = std::max(best, tp / static_cast<double>(j + 1));
    }
    ap += best / static_cast<double>(positives);
  }
  return ap;
}

/// Inflated-label membership: t is positive for a critical point iff
/// |t - round(point)| <= ceil(delta * L).
inline bool inflated_member(double point, double L, double delta, std::size_t t) {
  const double c = std::floor(point + 0.5);
  const double reach = std::ceil(delta * L - 1e-9);
  return std::abs(static_cast<double>(t) - c) <= reach;
}

}  // namespace tsa::oracle
