// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "tsa/checkpoint.hpp"
#include "tsa/error.hpp"
#include "tsa/parallel.hpp"
#include "tsa/text.hpp"

namespace tsa {

namespace {

constexpr const char* kDurationParam = "pairing.duration_range";

// The φ file holds the network parameters followed by the duration gate.
ad::ParamSet phi_file_layout(const PhiNetwork& net) {
  ad::ParamSet out;
  for (const auto& p : net.params()) {
    const auto i = out.add(p.name, p.shape);
    out[i].values = p.values;
  }
  out.add(kDurationParam, {2});
  return out;
}

std::uint64_t phi_file_digest() { return PhiNetwork::digest() ^ 0x5041495247415445ull; }

}  // namespace

DatasetSplit split_videos(std::size_t count, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction >= 0.0 && val_fraction <= 1.0)) throw ConfigError("validation fraction must lie in [0, 1]");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(count)));
  DatasetSplit split;
  split.val.assign(order.begin(), order.begin() + static_cast<long>(n_val));
  split.train.assign(order.begin() + static_cast<long>(n_val), order.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

std::vector<AnnotationSet> align_annotations(const std::vector<FeatureSequence>& features,
                                             const std::vector<AnnotationSet>& annotations) {
  std::unordered_map<std::string, const AnnotationSet*> by_id;
  for (const auto& a : annotations) by_id.emplace(a.video_id, &a);
  std::vector<AnnotationSet> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    auto it = by_id.find(f.video_id);
    if (it == by_id.end()) throw DataError("no annotations for video '" + f.video_id + "'");
    if (it->second->length != f.length()) {
      throw DataError("video '" + f.video_id + "': annotation length " + std::to_string(it->second->length) +
                      " but " + std::to_string(f.length()) + " feature snippets");
    }
    out.push_back(*it->second);
  }
  return out;
}

std::vector<TrainingSample> training_samples(const std::vector<FeatureSequence>& features,
                                             const std::vector<AnnotationSet>& aligned, double delta) {
  if (features.size() != aligned.size()) throw DataError("features and annotations differ in video count");
  std::vector<TrainingSample> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.push_back({features[i].features, inflate_labels(aligned[i], delta).to_tensor()});
  }
  return out;
}

void save_phi_model(const std::string& path, const PhiModel& model) {
  auto params = phi_file_layout(model.network);
  params[params.index_of(kDurationParam)].values = {model.d_min, model.d_max};
  save_checkpoint(path, params, phi_file_digest());
}

PhiModel load_phi_model(const std::string& path) {
  PhiModel model;
  auto params = phi_file_layout(model.network);
  load_checkpoint(path, phi_file_digest(), params);
  auto& net = model.network.params();
  for (std::size_t i = 0; i < net.size(); ++i) net[i].values = params[i].values;
  const auto& range = params[params.index_of(kDurationParam)].values;
  model.d_min = range[0];
  model.d_max = range[1];
  if (!(model.d_min > 0.0 && model.d_min <= model.d_max)) throw DataError(path + ": invalid stored duration range");
  return model;
}

std::vector<ProbabilityTriple> detect_all(const Detector& detector, const std::vector<FeatureSequence>& features,
                                          std::size_t threads) {
  std::vector<ProbabilityTriple> out(features.size());
  parallel_for(features.size(), threads, [&](std::size_t i) { out[i] = detector_forward(features[i].features, detector); });
  return out;
}

std::vector<PhiSample> collect_phi_samples(const std::vector<ProbabilityTriple>& triples,
                                           const std::vector<AnnotationSet>& aligned, const PairingConfig& pairing,
                                           std::uint64_t seed) {
  if (triples.size() != aligned.size()) throw DataError("probabilities and annotations differ in video count");
  std::vector<PhiSample> out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto s = build_phi_samples(triples[i], aligned[i], pairing, seed ^ (0x9e3779b97f4a7c15ull * (i + 1)));
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<VideoProposals> propose_all(const std::vector<ProbabilityTriple>& triples,
                                        const std::vector<FeatureSequence>& features, const PhiModel& phi,
                                        ProposalConfig cfg, std::size_t threads) {
  if (triples.size() != features.size()) throw DataError("probabilities and features differ in video count");
  cfg.pairing.d_min = phi.d_min;
  cfg.pairing.d_max = phi.d_max;
  std::vector<VideoProposals> out(features.size());
  parallel_for(features.size(), threads, [&](std::size_t i) {
    out[i] = {features[i].video_id, generate_proposals(triples[i], cfg, phi.network)};
  });
  return out;
}

}  // namespace tsa
