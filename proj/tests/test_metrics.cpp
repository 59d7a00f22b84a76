// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "metrics_fixture.hpp"
#include "oracles.hpp"
#include "tsa/error.hpp"
#include "tsa/metrics.hpp"

namespace tsa {
namespace {

constexpr double kFixtureTol = 1e-9;

std::vector<oracle::Interval> intervals(const std::vector<ScoredSegment>& s, std::size_t n = SIZE_MAX) {
  std::vector<oracle::Interval> out;
  for (std::size_t i = 0; i < s.size() && i < n; ++i) out.push_back({s[i].segment.start, s[i].segment.end});
  return out;
}

std::vector<oracle::Interval> intervals(const AnnotationSet& a) {
  std::vector<oracle::Interval> out;
  for (const auto& inst : a.instances) out.push_back({inst.start, inst.end});
  return out;
}

double oracle_ar(const std::vector<VideoPredictions>& p, const std::vector<AnnotationSet>& a, std::size_t an,
                 const std::vector<double>& grid) {
  double total = 0.0;
  for (const auto& v : a) total += static_cast<double>(v.instances.size());
  if (total == 0.0) return 0.0;
  double sum = 0.0;
  for (double thr : grid) {
    std::size_t hits = 0;
    for (std::size_t v = 0; v < a.size(); ++v) hits += oracle::greedy_matches(intervals(p[v].segments), an, intervals(a[v]), thr);
    sum += static_cast<double>(hits) / total;
  }
  return sum / static_cast<double>(grid.size());
}

double oracle_map(const std::vector<VideoPredictions>& d, const std::vector<AnnotationSet>& a, double thr) {
  std::map<int, std::size_t> positives;
  for (const auto& v : a) {
    for (const auto& inst : v.instances) ++positives[inst.class_id];
  }
  double sum = 0.0;
  for (const auto& [cls, n] : positives) {
    struct Det {
      double score;
      std::size_t video;
      oracle::Interval seg;
    };
    std::vector<Det> dets;
    for (std::size_t v = 0; v < d.size(); ++v) {
      for (const auto& s : d[v].segments) {
        if (s.class_id == cls) dets.push_back({s.score, v, {s.segment.start, s.segment.end}});
      }
    }
    std::stable_sort(dets.begin(), dets.end(), [](const Det& x, const Det& y) { return x.score > y.score; });
    std::vector<std::vector<oracle::Interval>> gt(a.size());
    for (std::size_t v = 0; v < a.size(); ++v) {
      for (const auto& inst : a[v].instances) {
        if (inst.class_id == cls) gt[v].push_back({inst.start, inst.end});
      }
    }
    std::vector<std::vector<char>> taken(a.size());
    for (std::size_t v = 0; v < a.size(); ++v) taken[v].assign(gt[v].size(), 0);
    std::vector<bool> hits;
    for (const auto& det : dets) {
      double best = 0.0;
      std::size_t best_g = SIZE_MAX;
      for (std::size_t g = 0; g < gt[det.video].size(); ++g) {
        const double iou = oracle::interval_iou(det.seg.start, det.seg.end, gt[det.video][g].start, gt[det.video][g].end);
        if (!taken[det.video][g] && iou > best) {
          best = iou;
          best_g = g;
        }
      }
      const bool hit = best_g != SIZE_MAX && best >= thr;
      if (hit) taken[det.video][best_g] = 1;
      hits.push_back(hit);
    }
    sum += oracle::ap_from_pr_curve(hits, n);
  }
  return positives.empty() ? 0.0 : sum / static_cast<double>(positives.size());
}

struct RandomCase {
  std::vector<AnnotationSet> annotations;
  std::vector<VideoPredictions> predictions;
};

RandomCase random_case(std::mt19937_64& rng, std::size_t videos, bool classes) {
  std::uniform_int_distribution<int> pos(0, 60);
  std::uniform_int_distribution<int> len(1, 25);
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_int_distribution<int> cls(0, 1);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  RandomCase rc;
  for (std::size_t v = 0; v < videos; ++v) {
    AnnotationSet a{"v" + std::to_string(v), 100, 1, {}};
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const int s = pos(rng);
      a.instances.push_back({static_cast<double>(s), static_cast<double>(s + len(rng)), cls(rng)});
    }
    VideoPredictions p{a.video_id, {}};
    const int m = count(rng) * 2;
    for (int i = 0; i < m; ++i) {
      const int s = pos(rng);
      p.segments.push_back({{static_cast<double>(s), static_cast<double>(s + len(rng))}, score(rng), classes ? cls(rng) : -1});
    }
    std::sort(p.segments.begin(), p.segments.end(), [](const auto& x, const auto& y) { return x.score > y.score; });
    rc.annotations.push_back(std::move(a));
    rc.predictions.push_back(std::move(p));
  }
  return rc;
}

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou_1d({3, 9}, {3, 9}), 1.0);
  EXPECT_DOUBLE_EQ(iou_1d({0, 5}, {6, 9}), 0.0);
  EXPECT_DOUBLE_EQ(iou_1d({0, 5}, {5, 9}), 0.0);
  EXPECT_DOUBLE_EQ(iou_1d({0, 10}, {5, 15}), 5.0 / 15.0);
  EXPECT_THROW(iou_1d({4, 4}, {0, 9}), DataError);
  EXPECT_THROW(iou_1d({0, 9}, {5, 2}), DataError);
}

TEST(Iou, RandomPairsMatchIntervalOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    double a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
    if (a0 > a1) std::swap(a0, a1);
    if (b0 > b1) std::swap(b0, b1);
    if (a0 == a1 || b0 == b1) continue;
    const double got = iou_1d({a0, a1}, {b0, b1});
    EXPECT_NEAR(got, oracle::interval_iou(a0, a1, b0, b1), 1e-12);
    EXPECT_EQ(got, iou_1d({b0, b1}, {a0, a1}));
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
    EXPECT_LT(got, 1.0);
  }
}

TEST(IoUGridTest, PresetsAndParsing) {
  const auto thumos = IoUGrid::thumos();
  ASSERT_EQ(thumos.size(), 11u);
  EXPECT_EQ(thumos.thresholds().front(), 0.5);
  EXPECT_EQ(thumos.thresholds().back(), 1.0);
  EXPECT_EQ(thumos.thresholds()[4], 0.7);
  const auto anet = IoUGrid::activitynet();
  ASSERT_EQ(anet.size(), 10u);
  EXPECT_EQ(anet.thresholds().back(), 0.95);
  EXPECT_EQ(IoUGrid::parse("0.3,0.5").thresholds(), (std::vector<double>{0.3, 0.5}));
  EXPECT_THROW(IoUGrid::parse("0.5,0.5"), ConfigError);
  EXPECT_THROW(IoUGrid::parse("0,0.5"), ConfigError);
  EXPECT_THROW(IoUGrid::parse("0.5,1.1"), ConfigError);
  EXPECT_THROW(IoUGrid(std::vector<double>{}), ConfigError);
}

TEST(AverageRecall, TrivialCases) {
  const auto gt = fixture::crafted_annotations();
  std::vector<VideoPredictions> exact;
  std::vector<VideoPredictions> none;
  for (const auto& a : gt) {
    VideoPredictions p{a.video_id, {}};
    for (const auto& inst : a.instances) p.segments.push_back({{inst.start, inst.end}, 1.0});
    exact.push_back(p);
    none.push_back({a.video_id, {}});
  }
  EXPECT_DOUBLE_EQ(average_recall_at_an(exact, gt, 3, IoUGrid::thumos()), 1.0);
  EXPECT_DOUBLE_EQ(average_recall_at_an(none, gt, 100, IoUGrid::thumos()), 0.0);
  EXPECT_DOUBLE_EQ(average_recall_at_an({}, gt, 100, IoUGrid::thumos()), 0.0);
  EXPECT_DOUBLE_EQ(auc_ar_an(none, gt, 100, IoUGrid::thumos()), 0.0);
  EXPECT_THROW(auc_ar_an(exact, gt, 0, IoUGrid::thumos()), ConfigError);
}

TEST(Auc, PerfectFromTheFirstProposal) {
  // one instance per video, so AR is already 1 at AN = 1
  const std::vector<AnnotationSet> gt{{"a", 50, 1, {{3, 9, 0}}}, {"b", 50, 1, {{10, 40, 0}}}};
  const std::vector<VideoPredictions> exact{{"a", {{{3, 9}, 0.9}, {{20, 30}, 0.1}}}, {"b", {{{10, 40}, 0.8}}}};
  EXPECT_DOUBLE_EQ(auc_ar_an(exact, gt, 100, IoUGrid::thumos()), 99.5 / 100.0);
  EXPECT_DOUBLE_EQ(auc_ar_an(exact, gt, 10, IoUGrid::thumos()), 9.5 / 10.0);
}

TEST(AverageRecall, EmptyVideosLeaveTheDenominator) {
  auto gt = fixture::crafted_annotations();
  auto props = fixture::crafted_proposals();
  const double before = average_recall_at_an(props, gt, 4, IoUGrid::thumos());
  gt.push_back({"D", 50, 1, {}});
  props.push_back({"D", {{{0, 10}, 0.9}}});
  EXPECT_DOUBLE_EQ(average_recall_at_an(props, gt, 4, IoUGrid::thumos()), before);
}

TEST(CraftedFixture, AverageRecallMatchesHandValues) {
  const auto gt = fixture::crafted_annotations();
  const auto props = fixture::crafted_proposals();
  for (const auto& [an, want] : fixture::expected_ar()) {
    EXPECT_NEAR(average_recall_at_an(props, gt, an, IoUGrid::thumos()), want, kFixtureTol) << "AN=" << an;
    EXPECT_NEAR(oracle_ar(props, gt, an, IoUGrid::thumos().thresholds()), want, kFixtureTol) << "AN=" << an;
  }
  EXPECT_NEAR(average_recall_at_an(props, gt, 100, IoUGrid::thumos()), 28.0 / 33.0, kFixtureTol);
}

TEST(CraftedFixture, AucMatchesHandValue) {
  EXPECT_NEAR(auc_ar_an(fixture::crafted_proposals(), fixture::crafted_annotations(), 100, IoUGrid::thumos()),
              fixture::kExpectedAuc100, kFixtureTol);
}

TEST(CraftedFixture, RecallVsIouMatchesHandValues) {
  std::vector<double> points;
  for (const auto& [iou, r] : fixture::expected_recall_iou()) points.push_back(iou);
  const auto got = recall_vs_iou(fixture::crafted_proposals(), fixture::crafted_annotations(), 100, points);
  ASSERT_EQ(got.size(), points.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].first, points[i]);
    EXPECT_NEAR(got[i].second, fixture::expected_recall_iou()[i].second, kFixtureTol) << "IoU=" << points[i];
  }
}

TEST(CraftedFixture, MapMatchesHandValues) {
  const auto gt = fixture::crafted_annotations();
  const auto dets = fixture::crafted_detections();
  for (const auto& [iou, want] : fixture::expected_map()) {
    EXPECT_NEAR(map_at_iou(dets, gt, iou), want, kFixtureTol) << "IoU=" << iou;
    EXPECT_NEAR(oracle_map(dets, gt, iou), want, kFixtureTol) << "IoU=" << iou;
  }
  const auto aps = per_class_ap(dets, gt, 0.5);
  ASSERT_EQ(aps.size(), 2u);
  EXPECT_NEAR(aps.at(0), 5.0 / 9.0, kFixtureTol);
  EXPECT_NEAR(aps.at(1), 1.0 / 3.0, kFixtureTol);
}

TEST(CraftedFixture, EvaluateReportCarriesTheSameNumbers) {
  EvalSettings settings;
  settings.ar_ans = {1, 2, 3, 4};
  const auto report = evaluate(fixture::crafted_detections(), fixture::crafted_annotations(), settings);
  EXPECT_EQ(report.video_count, 3u);
  EXPECT_EQ(report.instance_count, 6u);
  ASSERT_EQ(report.map.size(), settings.map_ious.size());
  EXPECT_NEAR(report.map[2].second, 4.0 / 9.0, kFixtureTol);

  const auto props = evaluate(fixture::crafted_proposals(), fixture::crafted_annotations(), settings);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(props.ar_at[i].second, fixture::expected_ar()[i].second, kFixtureTol);
  EXPECT_NEAR(props.auc, fixture::kExpectedAuc100, kFixtureTol);
  EXPECT_TRUE(props.map.empty());
  ASSERT_EQ(props.ar_an.size(), 101u);
  EXPECT_EQ(props.ar_an[0], 0.0);
  const auto text = format_report(props);
  EXPECT_NE(text.find("instances = 6"), std::string::npos);
  EXPECT_NE(text.find("AUC@100"), std::string::npos);
  EXPECT_EQ(format_ar_an_csv(props).rfind("AN,AR\n0,0\n", 0), 0u);
  EXPECT_EQ(format_recall_iou_csv(props).rfind("IoU,recall\n", 0), 0u);
}

TEST(Map, TrivialCases) {
  const auto gt = fixture::crafted_annotations();
  std::vector<VideoPredictions> exact;
  std::vector<VideoPredictions> wrong;
  for (const auto& a : gt) {
    VideoPredictions e{a.video_id, {}};
    VideoPredictions w{a.video_id, {}};
    for (const auto& inst : a.instances) {
      e.segments.push_back({{inst.start, inst.end}, 0.5, inst.class_id});
      w.segments.push_back({{inst.start, inst.end}, 0.5, 1 - inst.class_id});
    }
    exact.push_back(e);
    wrong.push_back(w);
  }
  EXPECT_DOUBLE_EQ(map_at_iou(exact, gt, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(map_at_iou(wrong, gt, 0.5), 0.0);
  // a class no annotation defines is left out of the mean
  exact[0].segments.push_back({{0, 10}, 0.99, 7});
  EXPECT_DOUBLE_EQ(map_at_iou(exact, gt, 0.5), 1.0);
}

TEST(AveragePrecision, MatchesPrCurveOracle) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<bool> hits(rng() % 12);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      hits[i] = coin(rng);
      tp += hits[i] ? 1 : 0;
    }
    const std::size_t positives = tp + rng() % 3;
    EXPECT_NEAR(average_precision(hits, positives), oracle::ap_from_pr_curve(hits, positives), 1e-12);
  }
}

TEST(RandomCases, AgreeWithOracles) {
  std::mt19937_64 rng(2026);
  const auto grid = IoUGrid::thumos();
  for (int trial = 0; trial < 300; ++trial) {
    const auto rc = random_case(rng, 1 + trial % 4, true);
    std::vector<double> curve{0.0};
    for (std::size_t an = 1; an <= 8; ++an) {
      const double ar = average_recall_at_an(rc.predictions, rc.annotations, an, grid);
      EXPECT_NEAR(ar, oracle_ar(rc.predictions, rc.annotations, an, grid.thresholds()), 1e-12);
      curve.push_back(oracle_ar(rc.predictions, rc.annotations, an, grid.thresholds()));
    }
    double direct = 0.0;
    for (std::size_t an = 1; an < curve.size(); ++an) direct += (curve[an - 1] + curve[an]) / 2.0;
    direct /= 8.0;
    EXPECT_NEAR(auc_ar_an(rc.predictions, rc.annotations, 8, grid), direct, 1e-12);
    for (double thr : {0.1, 0.5, 0.7}) {
      EXPECT_NEAR(map_at_iou(rc.predictions, rc.annotations, thr), oracle_map(rc.predictions, rc.annotations, thr), 1e-12);
    }
  }
}

TEST(Properties, MonotoneInAnAndIou) {
  std::mt19937_64 rng(99);
  const auto grid = IoUGrid::thumos();
  std::vector<double> points;
  for (int i = 0; i <= 20; ++i) points.push_back(i / 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rc = random_case(rng, 3, false);
    double prev = 0.0;
    for (std::size_t an = 0; an <= 10; ++an) {
      const double ar = average_recall_at_an(rc.predictions, rc.annotations, an, grid);
      EXPECT_GE(ar, prev);
      EXPECT_LE(ar, 1.0);
      prev = ar;
    }
    const auto curve = recall_vs_iou(rc.predictions, rc.annotations, 10, points);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].second, curve[i - 1].second);
  }
}

TEST(Properties, OnlyScoreRankMatters) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rc = random_case(rng, 3, true);
    auto squashed = rc.predictions;
    for (auto& v : squashed) {
      for (auto& s : v.segments) s.score = std::exp(3.0 * s.score) - 5.0;
    }
    const EvalSettings settings;
    const auto a = evaluate(rc.predictions, rc.annotations, settings);
    const auto b = evaluate(squashed, rc.annotations, settings);
    EXPECT_EQ(a.ar_an, b.ar_an);
    EXPECT_EQ(a.map, b.map);
  }
}

}  // namespace
}  // namespace tsa
