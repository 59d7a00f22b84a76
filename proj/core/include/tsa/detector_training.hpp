// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tsa/mdc_network.hpp"
#include "tsa/optimizer.hpp"
#include "tsa/tensor.hpp"

namespace tsa {

/// Features (D x T) with aligned inflated labels (3 x T).
struct TrainingSample {
  ad::Tensor2D features;
  ad::Tensor2D labels;
};

struct DetectorTrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  LearningRateSchedule lr;
  ad::OptimizerKind optimizer = ad::OptimizerKind::kAdam;
  double momentum = 0.0;  // SGD only
  /// Videos are cut into consecutive tiles of this many snippets (0: whole
  /// videos); see tile_video.
  std::size_t window = 64;
  std::uint64_t seed = 0;
  /// Batch items evaluated concurrently; results do not depend on it.
  std::size_t threads = 1;
};

struct DetectorTrainResult {
  Detector detector;
  std::vector<double> epoch_loss;  // mean per-video J = J(s) + J(i) + J(e)
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss, double learning_rate)>;

/// Sum of the three cross-entropy terms for one video.
double detection_loss(const Detector& detector, const TrainingSample& sample);

/// Minimises the summed cross-entropy of the three critical-point sequences
/// over shuffled minibatches of tiles (margin = the detector's context
/// radius). Batch gradients are the mean of per-tile gradients, reduced in
/// batch order.
DetectorTrainResult train_detector(std::span<const TrainingSample> dataset, const DetectorConfig& config,
                                   const DetectorTrainConfig& schedule, const EpochCallback& on_epoch = {});

/// Snippets [begin, end) of one video. The network runs on the wider
/// [context_begin, context_end) and only the outputs inside the tile enter
/// the loss.
struct TrainingTile {
  std::size_t video = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t context_begin = 0;
  std::size_t context_end = 0;

  friend bool operator==(const TrainingTile&, const TrainingTile&) = default;
};

/// Splits [0, T) into tiles [0, w), [w, 2w), ... (the last one possibly
/// shorter; w = 0 gives a single tile) and widens each by `margin` on both
/// sides, clipped to [0, T). With margin >= DetectorConfig::context_radius()
/// every output inside a tile equals the output of a whole-video pass, so
/// the tile losses of a video add up to its full loss.
std::vector<TrainingTile> tile_video(std::size_t video, std::size_t length, std::size_t window, std::size_t margin);

/// Cross-entropy of one tile.
ad::Var tile_loss(ad::Tape& tape, const Detector& detector, const TrainingSample& sample, const TrainingTile& tile);

}  // namespace tsa
