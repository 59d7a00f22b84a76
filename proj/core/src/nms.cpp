// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "tsa/error.hpp"
#include "tsa/proposal.hpp"

namespace tsa {

namespace {

bool ranks_before(const Proposal& a, const Proposal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.start != b.start) return a.start < b.start;
  return a.end < b.end;
}

}  // namespace

std::vector<Proposal> greedy_nms(std::vector<Proposal> proposals, double iou_threshold) {
  for (const auto& p : proposals) {
    if (!std::isfinite(p.score)) throw NumericError("greedy_nms: non-finite proposal score");
  }
  sort_by_score(proposals);
  std::vector<Proposal> kept;
  std::vector<bool> removed(proposals.size(), false);
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    if (removed[i]) continue;
    kept.push_back(proposals[i]);
    const Segment top = proposals[i].segment();
    for (std::size_t j = i + 1; j < proposals.size(); ++j) {
      if (!removed[j] && iou_1d(top, proposals[j].segment()) > iou_threshold) removed[j] = true;
    }
  }
  return kept;
}

std::vector<Proposal> soft_nms(std::vector<Proposal> proposals, double sigma, double score_floor) {
  if (!(sigma > 0.0)) throw ConfigError("soft_nms sigma must be positive");
  for (const auto& p : proposals) {
    if (!std::isfinite(p.score)) throw NumericError("soft_nms: non-finite proposal score");
  }
  std::vector<Proposal> done;
  done.reserve(proposals.size());
  std::vector<Proposal> pending = std::move(proposals);
  while (!pending.empty()) {
    auto best_it = std::min_element(pending.begin(), pending.end(), ranks_before);
    // Scores only decay, so once the best is below the floor all the rest
    // will be dropped as well.
    if (best_it->score < score_floor) break;
    Proposal best = *best_it;
    *best_it = pending.back();
    pending.pop_back();
    const Segment top = best.segment();
    for (auto& p : pending) {
      const double iou = iou_1d(top, p.segment());
      if (iou > 0.0) p.score *= std::exp(-(iou * iou) / sigma);
    }
    done.push_back(best);
  }
  std::erase_if(done, [&](const Proposal& p) { return p.score < score_floor; });
  sort_by_score(done);
  return done;
}

NmsMethod parse_nms_method(const std::string& name) {
  if (name == "greedy") return NmsMethod::kGreedy;
  if (name == "soft") return NmsMethod::kSoft;
  throw ConfigError("unknown NMS method '" + name + "' (expected greedy or soft)");
}

std::string to_string(NmsMethod method) { return method == NmsMethod::kGreedy ? "greedy" : "soft"; }

std::vector<Proposal> score_proposals(const ProbabilityTriple& triple, const PairingConfig& pairing,
                                      const PhiNetwork& phi) {
  CandidatePoints points{select_candidates(triple.start, pairing.point_threshold),
                         select_candidates(triple.end, pairing.point_threshold)};
  const auto pairs = pair_candidates(points, triple.mid, pairing);
  std::vector<PhiFeatures> features;
  features.reserve(pairs.size());
  for (const auto& [s, e] : pairs) features.push_back(phi_features(s, e, triple));
  const auto phis = phi_forward_batch(features, phi);

  std::vector<Proposal> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Proposal p;
    p.start = pairs[i].first;
    p.end = pairs[i].second;
    p.mid = mid_index(p.start, p.end);
    p.p_start = triple.start[p.start];
    p.p_end = triple.end[p.end];
    p.phi = phis[i];
    p.score = bayesian_score(p.p_start, p.p_end, p.phi);
    out.push_back(p);
  }
  sort_by_score(out);
  return out;
}

std::vector<Proposal> generate_proposals(const ProbabilityTriple& triple, const ProposalConfig& cfg,
                                         const PhiNetwork& phi) {
  auto scored = score_proposals(triple, cfg.pairing, phi);
  std::vector<Proposal> kept = cfg.nms == NmsMethod::kGreedy
                                   ? greedy_nms(std::move(scored), cfg.nms_iou_threshold)
                                   : soft_nms(std::move(scored), cfg.soft_sigma, cfg.soft_floor);
  if (kept.size() > cfg.top_k) kept.resize(cfg.top_k);
  return kept;
}

}  // namespace tsa
