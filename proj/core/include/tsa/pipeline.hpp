// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

// Multi-video stages of the proposal pipeline: dataset splitting, sample
// assembly for both training stages, and batch proposal generation.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tsa/detector_training.hpp"
#include "tsa/labeling.hpp"
#include "tsa/mdc_network.hpp"
#include "tsa/proposal.hpp"
#include "tsa/synth.hpp"

namespace tsa {

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Seeded shuffle of 0..count-1; the first round(val_fraction * count)
/// indices go to validation. Both halves are returned in ascending order.
DatasetSplit split_videos(std::size_t count, double val_fraction, std::uint64_t seed);

/// Annotations reordered to follow `features` by video id. Throws DataError
/// when a feature sequence has no annotation or the lengths disagree.
std::vector<AnnotationSet> align_annotations(const std::vector<FeatureSequence>& features,
                                             const std::vector<AnnotationSet>& annotations);

/// Features paired with their inflated start/mid/end targets.
std::vector<TrainingSample> training_samples(const std::vector<FeatureSequence>& features,
                                             const std::vector<AnnotationSet>& aligned,
                                             double delta = kDefaultInflation);

/// Trained confidence network plus the duration gate it was trained under.
struct PhiModel {
  PhiNetwork network;
  double d_min = 1.0;
  double d_max = 1e9;
};

void save_phi_model(const std::string& path, const PhiModel& model);
PhiModel load_phi_model(const std::string& path);

/// Detector probabilities of every video, computed on `threads` workers.
std::vector<ProbabilityTriple> detect_all(const Detector& detector, const std::vector<FeatureSequence>& features,
                                          std::size_t threads);

/// φ training pairs from all videos; each video subsamples its negatives
/// with a seed derived from (seed, video index).
std::vector<PhiSample> collect_phi_samples(const std::vector<ProbabilityTriple>& triples,
                                           const std::vector<AnnotationSet>& aligned, const PairingConfig& pairing,
                                           std::uint64_t seed);

/// Proposals of every video in input order. The duration gate of `cfg` is
/// replaced by the one stored in `phi`.
std::vector<VideoProposals> propose_all(const std::vector<ProbabilityTriple>& triples,
                                        const std::vector<FeatureSequence>& features, const PhiModel& phi,
                                        ProposalConfig cfg, std::size_t threads);

}  // namespace tsa
