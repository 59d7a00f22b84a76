// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tsa/labeling.hpp"

namespace tsa {

/// A real interval [start, end] on the snippet axis.
struct Segment {
  double start = 0.0;
  double end = 0.0;
};

/// Intersection over union of two intervals; both need start < end.
double iou_1d(const Segment& a, const Segment& b);

/// Ordered list of IoU thresholds.
class IoUGrid {
 public:
  explicit IoUGrid(std::vector<double> thresholds);

  /// 0.50, 0.55, ..., 1.00 (11 values).
  static IoUGrid thumos();
  /// 0.50, 0.55, ..., 0.95 (10 values).
  static IoUGrid activitynet();
  /// Parses "thumos", "activitynet" or a comma separated list.
  static IoUGrid parse(const std::string& spec);

  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  std::size_t size() const noexcept { return thresholds_.size(); }

 private:
  std::vector<double> thresholds_;
};

/// A scored segment as seen by the evaluator. Lists are ordered by score,
/// highest first; only that order matters to recall metrics.
struct ScoredSegment {
  Segment segment;
  double score = 0.0;
  int class_id = -1;  // -1: class agnostic
};

struct VideoPredictions {
  std::string video_id;
  std::vector<ScoredSegment> segments;
};

/// Number of ground-truth segments matched by `ranked` under one-to-one
/// greedy matching: proposals are visited in order, each claims the
/// still-unmatched ground truth with the highest IoU, provided that IoU is
/// >= threshold and > 0.
std::size_t count_matches(const std::vector<ScoredSegment>& ranked, std::size_t top_n,
                          const std::vector<Segment>& ground_truth, double threshold);

/// Mean over the grid of the recall reached by the top-AN proposals of every
/// video. Videos without annotations do not enter the denominator; videos
/// missing from `predictions` count as having no proposals.
double average_recall_at_an(const std::vector<VideoPredictions>& predictions,
                            const std::vector<AnnotationSet>& annotations, std::size_t an,
                            const IoUGrid& grid);

/// AR for every AN in 0..an_max (AR(0) = 0).
std::vector<double> ar_an_curve(const std::vector<VideoPredictions>& predictions,
                                const std::vector<AnnotationSet>& annotations, std::size_t an_max,
                                const IoUGrid& grid);

/// Trapezoidal area under AR(AN) for AN = 0..an_max, divided by an_max.
double auc_ar_an(const std::vector<VideoPredictions>& predictions,
                 const std::vector<AnnotationSet>& annotations, std::size_t an_max, const IoUGrid& grid);
/// Same, from a precomputed curve (curve[an] for an = 0..an_max).
double auc_from_curve(const std::vector<double>& curve);

/// Recall at each threshold separately, top-AN proposals per video.
std::vector<std::pair<double, double>> recall_vs_iou(const std::vector<VideoPredictions>& predictions,
                                                     const std::vector<AnnotationSet>& annotations,
                                                     std::size_t an, const std::vector<double>& iou_points);

/// All-points interpolated average precision from a ranked TP/FP list.
double average_precision(const std::vector<bool>& ranked_is_tp, std::size_t positives);

/// Mean AP over classes that have at least one annotated instance.
/// Detections whose class is not annotated anywhere are ignored.
double map_at_iou(const std::vector<VideoPredictions>& detections,
                  const std::vector<AnnotationSet>& annotations, double iou_threshold);

/// Per-class AP used by map_at_iou (class id -> AP).
std::map<int, double> per_class_ap(const std::vector<VideoPredictions>& detections,
                                   const std::vector<AnnotationSet>& annotations, double iou_threshold);

struct EvalReport {
  std::vector<std::pair<std::size_t, double>> ar_at;   // (AN, AR)
  std::size_t auc_an_max = 100;
  double auc = 0.0;                                    // in [0, 1]
  std::vector<double> ar_an;                           // AR for AN = 0..auc_an_max
  std::size_t recall_an = 100;
  std::vector<std::pair<double, double>> recall_iou;  // (IoU, recall)
  std::vector<std::pair<double, double>> map;         // (IoU, mAP); empty without classes
  std::size_t video_count = 0;
  std::size_t instance_count = 0;
};

struct EvalSettings {
  std::vector<std::size_t> ar_ans{10, 20, 50, 100, 200};
  std::size_t auc_an_max = 100;
  IoUGrid grid = IoUGrid::thumos();
  std::size_t recall_an = 100;
  std::vector<double> recall_ious{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> map_ious{0.3, 0.4, 0.5, 0.6, 0.7};
};

EvalReport evaluate(const std::vector<VideoPredictions>& predictions,
                    const std::vector<AnnotationSet>& annotations, const EvalSettings& settings);

/// key = value text block.
std::string format_report(const EvalReport& report);
/// "AN,AR" rows for AN = 0..auc_an_max.
std::string format_ar_an_csv(const EvalReport& report);
/// "IoU,recall" rows.
std::string format_recall_iou_csv(const EvalReport& report);

}  // namespace tsa
