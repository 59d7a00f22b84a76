// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tsa/error.hpp"
#include "tsa/text.hpp"

namespace tsa {

namespace {

// Grid values are built as (integer / 100) so that they are the correctly
// rounded doubles of the decimal thresholds; IoUs of integer segments such
// as 7/10 then compare equal to 0.7.
std::vector<double> percent_range(int from, int to, int step) {
  std::vector<double> out;
  for (int v = from; v <= to; v += step) out.push_back(static_cast<double>(v) / 100.0);
  return out;
}

std::vector<Segment> segments_of(const AnnotationSet& a, int class_id = -1) {
  std::vector<Segment> out;
  for (const auto& inst : a.instances) {
    if (class_id < 0 || inst.class_id == class_id) out.push_back({inst.start, inst.end});
  }
  return out;
}

const std::vector<ScoredSegment>* find_video(
    const std::unordered_map<std::string, const VideoPredictions*>& index, const std::string& id) {
  auto it = index.find(id);
  return it == index.end() ? nullptr : &it->second->segments;
}

std::unordered_map<std::string, const VideoPredictions*> index_predictions(
    const std::vector<VideoPredictions>& predictions) {
  std::unordered_map<std::string, const VideoPredictions*> index;
  for (const auto& p : predictions) index.emplace(p.video_id, &p);
  return index;
}

// Matched and total ground-truth counts summed over videos, one per threshold.
std::pair<std::vector<std::size_t>, std::size_t> pooled_matches(
    const std::vector<VideoPredictions>& predictions, const std::vector<AnnotationSet>& annotations,
    std::size_t an, const std::vector<double>& thresholds) {
  const auto index = index_predictions(predictions);
  std::vector<std::size_t> matched(thresholds.size(), 0);
  std::size_t total = 0;
  static const std::vector<ScoredSegment> kNone;
  for (const auto& video : annotations) {
    if (video.instances.empty()) continue;
    const auto gt = segments_of(video);
    total += gt.size();
    const auto* ranked = find_video(index, video.video_id);
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      matched[k] += count_matches(ranked ? *ranked : kNone, an, gt, thresholds[k]);
    }
  }
  return {matched, total};
}

}  // namespace

double iou_1d(const Segment& a, const Segment& b) {
  if (!(a.start < a.end) || !(b.start < b.end)) throw DataError("iou_1d needs segments with start < end");
  const double inter = std::min(a.end, b.end) - std::max(a.start, b.start);
  if (inter <= 0.0) return 0.0;
  const double uni = std::max(a.end, b.end) - std::min(a.start, b.start);
  return inter / uni;
}

IoUGrid::IoUGrid(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {
  if (thresholds_.empty()) throw ConfigError("IoU grid must not be empty");
  for (std::size_t i = 0; i < thresholds_.size(); ++i) {
    if (!(thresholds_[i] > 0.0 && thresholds_[i] <= 1.0)) throw ConfigError("IoU grid values must lie in (0, 1]");
    if (i > 0 && !(thresholds_[i - 1] < thresholds_[i])) throw ConfigError("IoU grid must be strictly increasing");
  }
}

IoUGrid IoUGrid::thumos() { return IoUGrid(percent_range(50, 100, 5)); }
IoUGrid IoUGrid::activitynet() { return IoUGrid(percent_range(50, 95, 5)); }

IoUGrid IoUGrid::parse(const std::string& spec) {
  if (spec == "thumos") return thumos();
  if (spec == "activitynet") return activitynet();
  std::vector<double> values;
  for (auto tok : text::split(spec, ',')) values.push_back(text::parse_double(text::trim(tok), "IoU grid"));
  return IoUGrid(std::move(values));
}

std::size_t count_matches(const std::vector<ScoredSegment>& ranked, std::size_t top_n,
                          const std::vector<Segment>& ground_truth, double threshold) {
  std::vector<bool> used(ground_truth.size(), false);
  std::size_t matched = 0;
  const std::size_t n = std::min(top_n, ranked.size());
  for (std::size_t i = 0; i < n && matched < ground_truth.size(); ++i) {
    double best = -1.0;
    std::size_t best_j = ground_truth.size();
    for (std::size_t j = 0; j < ground_truth.size(); ++j) {
      if (used[j]) continue;
      const double iou = iou_1d(ranked[i].segment, ground_truth[j]);
      if (iou > best) {
        best = iou;
        best_j = j;
      }
    }
    if (best_j < ground_truth.size() && best > 0.0 && best >= threshold) {
      used[best_j] = true;
      ++matched;
    }
  }
  return matched;
}

double average_recall_at_an(const std::vector<VideoPredictions>& predictions,
                            const std::vector<AnnotationSet>& annotations, std::size_t an,
                            const IoUGrid& grid) {
  const auto [matched, total] = pooled_matches(predictions, annotations, an, grid.thresholds());
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t m : matched) sum += static_cast<double>(m) / static_cast<double>(total);
  return sum / static_cast<double>(grid.size());
}

std::vector<double> ar_an_curve(const std::vector<VideoPredictions>& predictions,
                                const std::vector<AnnotationSet>& annotations, std::size_t an_max,
                                const IoUGrid& grid) {
  std::vector<double> curve(an_max + 1, 0.0);
  for (std::size_t an = 1; an <= an_max; ++an) curve[an] = average_recall_at_an(predictions, annotations, an, grid);
  return curve;
}

double auc_from_curve(const std::vector<double>& curve) {
  if (curve.size() < 2) throw ConfigError("AR-AN curve needs an_max >= 1");
  double area = 0.0;
  for (std::size_t an = 1; an < curve.size(); ++an) area += 0.5 * (curve[an - 1] + curve[an]);
  return area / static_cast<double>(curve.size() - 1);
}

double auc_ar_an(const std::vector<VideoPredictions>& predictions,
                 const std::vector<AnnotationSet>& annotations, std::size_t an_max, const IoUGrid& grid) {
  if (an_max == 0) throw ConfigError("auc_ar_an needs an_max >= 1");
  return auc_from_curve(ar_an_curve(predictions, annotations, an_max, grid));
}

std::vector<std::pair<double, double>> recall_vs_iou(const std::vector<VideoPredictions>& predictions,
                                                     const std::vector<AnnotationSet>& annotations,
                                                     std::size_t an, const std::vector<double>& iou_points) {
  const auto [matched, total] = pooled_matches(predictions, annotations, an, iou_points);
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < iou_points.size(); ++k) {
    out.emplace_back(iou_points[k], total == 0 ? 0.0 : static_cast<double>(matched[k]) / static_cast<double>(total));
  }
  return out;
}

double average_precision(const std::vector<bool>& ranked_is_tp, std::size_t positives) {
  if (positives == 0) return 0.0;
  const std::size_t n = ranked_is_tp.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked_is_tp[i]) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(positives);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // precision envelope, right to left
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (recall[i] != prev_recall) {
      ap += (recall[i] - prev_recall) * precision[i];
      prev_recall = recall[i];
    }
  }
  return ap;
}

std::map<int, double> per_class_ap(const std::vector<VideoPredictions>& detections,
                                   const std::vector<AnnotationSet>& annotations, double iou_threshold) {
  std::set<int> classes;
  for (const auto& a : annotations) {
    for (const auto& inst : a.instances) classes.insert(inst.class_id);
  }
  const auto index = index_predictions(detections);

  struct Ranked {
    double score;
    std::size_t video;
    Segment segment;
  };
  std::map<int, double> aps;
  for (int cls : classes) {
    std::vector<std::vector<Segment>> gt(annotations.size());
    std::size_t positives = 0;
    std::vector<Ranked> ranked;
    for (std::size_t v = 0; v < annotations.size(); ++v) {
      gt[v] = segments_of(annotations[v], cls);
      positives += gt[v].size();
      if (const auto* dets = find_video(index, annotations[v].video_id)) {
        for (const auto& d : *dets) {
          if (d.class_id == cls) ranked.push_back({d.score, v, d.segment});
        }
      }
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    std::vector<std::vector<bool>> used(annotations.size());
    for (std::size_t v = 0; v < annotations.size(); ++v) used[v].assign(gt[v].size(), false);
    std::vector<bool> is_tp;
    is_tp.reserve(ranked.size());
    for (const auto& r : ranked) {
      double best = 0.0;
      std::size_t best_j = gt[r.video].size();
      for (std::size_t j = 0; j < gt[r.video].size(); ++j) {
        if (used[r.video][j]) continue;
        const double iou = iou_1d(r.segment, gt[r.video][j]);
        if (iou > best) {
          best = iou;
          best_j = j;
        }
      }
      const bool tp = best_j < gt[r.video].size() && best >= iou_threshold;
      if (tp) used[r.video][best_j] = true;
      is_tp.push_back(tp);
    }
    aps[cls] = average_precision(is_tp, positives);
  }
  return aps;
}

double map_at_iou(const std::vector<VideoPredictions>& detections,
                  const std::vector<AnnotationSet>& annotations, double iou_threshold) {
  const auto aps = per_class_ap(detections, annotations, iou_threshold);
  if (aps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [cls, ap] : aps) sum += ap;
  return sum / static_cast<double>(aps.size());
}

EvalReport evaluate(const std::vector<VideoPredictions>& predictions,
                    const std::vector<AnnotationSet>& annotations, const EvalSettings& settings) {
  EvalReport report;
  report.video_count = annotations.size();
  for (const auto& a : annotations) report.instance_count += a.instances.size();
  for (std::size_t an : settings.ar_ans) {
    report.ar_at.emplace_back(an, average_recall_at_an(predictions, annotations, an, settings.grid));
  }
  report.auc_an_max = settings.auc_an_max;
  report.ar_an = ar_an_curve(predictions, annotations, settings.auc_an_max, settings.grid);
  report.auc = auc_from_curve(report.ar_an);
  report.recall_an = settings.recall_an;
  report.recall_iou = recall_vs_iou(predictions, annotations, settings.recall_an, settings.recall_ious);
  bool has_classes = false;
  for (const auto& p : predictions) {
    for (const auto& s : p.segments) has_classes = has_classes || s.class_id >= 0;
  }
  if (has_classes) {
    for (double iou : settings.map_ious) report.map.emplace_back(iou, map_at_iou(predictions, annotations, iou));
  }
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << "videos = " << report.video_count << '\n';
  out << "instances = " << report.instance_count << '\n';
  for (const auto& [an, ar] : report.ar_at) out << "AR@" << an << " = " << text::format_double(ar) << '\n';
  out << "AUC@" << report.auc_an_max << " = " << text::format_double(report.auc) << '\n';
  out << "AUC@" << report.auc_an_max << "_percent = " << text::format_double(report.auc * 100.0) << '\n';
  for (const auto& [iou, r] : report.recall_iou) {
    out << "recall@" << report.recall_an << "_iou" << text::format_double(iou) << " = " << text::format_double(r) << '\n';
  }
  for (const auto& [iou, m] : report.map) out << "mAP@" << text::format_double(iou) << " = " << text::format_double(m) << '\n';
  return out.str();
}

std::string format_ar_an_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "AN,AR\n";
  for (std::size_t an = 0; an < report.ar_an.size(); ++an) out << an << ',' << text::format_double(report.ar_an[an]) << '\n';
  return out.str();
}

std::string format_recall_iou_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "IoU,recall\n";
  for (const auto& [iou, r] : report.recall_iou) out << text::format_double(iou) << ',' << text::format_double(r) << '\n';
  return out.str();
}

}  // namespace tsa
