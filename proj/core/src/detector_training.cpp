// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/detector_training.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "tsa/error.hpp"
#include "tsa/ops.hpp"
#include "tsa/parallel.hpp"

namespace tsa {

namespace {

void check_sample(const TrainingSample& s, const DetectorConfig& config, std::size_t index) {
  if (s.features.channels() != config.input_dim) {
    throw ShapeError("training video " + std::to_string(index) + " has feature dim " +
                     std::to_string(s.features.channels()) + ", detector expects " + std::to_string(config.input_dim));
  }
  if (s.labels.channels() != 3 || s.labels.time() != s.features.time()) {
    throw ShapeError("training video " + std::to_string(index) + ": labels " + s.labels.shape_string() +
                     " not aligned with features " + s.features.shape_string());
  }
}

struct ItemResult {
  std::unique_ptr<ad::Tape> tape;
  double loss = 0.0;
};

}  // namespace

std::vector<TrainingTile> tile_video(std::size_t video, std::size_t length, std::size_t window, std::size_t margin) {
  if (length == 0) throw ShapeError("tile_video: empty video");
  const std::size_t w = window == 0 ? length : window;
  std::vector<TrainingTile> tiles;
  for (std::size_t begin = 0; begin < length; begin += w) {
    TrainingTile t;
    t.video = video;
    t.begin = begin;
    t.end = std::min(length, begin + w);
    t.context_begin = begin > margin ? begin - margin : 0;
    t.context_end = std::min(length, t.end + margin);
    tiles.push_back(t);
  }
  return tiles;
}

ad::Var tile_loss(ad::Tape& tape, const Detector& detector, const TrainingSample& sample, const TrainingTile& tile) {
  ad::Var x = tape.input(sample.features.slice_time(tile.context_begin, tile.context_end));
  ad::Var probs = detector.forward(tape, x);
  ad::Var inner = ad::slice_time(tape, probs, tile.begin - tile.context_begin, tile.end - tile.context_begin);
  return ad::binary_cross_entropy(tape, inner, sample.labels.slice_time(tile.begin, tile.end));
}

double detection_loss(const Detector& detector, const TrainingSample& sample) {
  ad::Tape tape;
  ad::Var x = tape.input(sample.features);
  ad::Var loss = ad::binary_cross_entropy(tape, detector.forward(tape, x), sample.labels);
  return tape.value(loss).values()[0];
}

DetectorTrainResult train_detector(std::span<const TrainingSample> dataset, const DetectorConfig& config,
                                   const DetectorTrainConfig& schedule, const EpochCallback& on_epoch) {
  if (dataset.empty()) throw DataError("train_detector needs a non-empty dataset");
  if (schedule.batch_size == 0 || schedule.epochs == 0) throw ConfigError("batch size and epochs must be positive");
  config.validate();
  for (std::size_t i = 0; i < dataset.size(); ++i) check_sample(dataset[i], config, i);

  DetectorTrainResult result{Detector(config), {}};
  Detector& det = result.detector;
  det.initialize(schedule.seed);
  ad::ParamSet& params = det.params();
  ad::Optimizer opt(schedule.optimizer, schedule.momentum);
  std::mt19937_64 rng(schedule.seed ^ 0x5eed5eed5eedull);
  std::vector<TrainingTile> items_all;
  for (std::size_t v = 0; v < dataset.size(); ++v) {
    const auto tiles = tile_video(v, dataset[v].features.time(), schedule.window, config.context_radius());
    items_all.insert(items_all.end(), tiles.begin(), tiles.end());
  }
  const std::size_t workers = std::max<std::size_t>(1, schedule.threads);

  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    std::shuffle(items_all.begin(), items_all.end(), rng);
    const double lr = schedule.lr.at(epoch);
    double total = 0.0;
    for (std::size_t b0 = 0; b0 < items_all.size(); b0 += schedule.batch_size) {
      const std::size_t n = std::min(schedule.batch_size, items_all.size() - b0);
      const double inv_n = 1.0 / static_cast<double>(n);
      // Items run in chunks of `workers`; gradients are folded in batch order
      // so the update does not depend on the worker count.
      for (std::size_t c0 = 0; c0 < n; c0 += workers) {
        const std::size_t chunk = std::min(workers, n - c0);
        std::vector<ItemResult> items(chunk);
        try {
          parallel_for(chunk, workers, [&](std::size_t j) {
            const TrainingTile& tile = items_all[b0 + c0 + j];
            auto tape = std::make_unique<ad::Tape>();
            ad::Var loss = tile_loss(*tape, det, dataset[tile.video], tile);
            items[j].loss = tape->value(loss).values()[0];
            tape->backward(loss);
            items[j].tape = std::move(tape);
          });
        } catch (const NumericError& e) {
          throw NumericError("detector training diverged at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(b0 / schedule.batch_size) + ": " + e.what());
        }
        for (auto& item : items) {
          total += item.loss;
          item.tape->accumulate_gradients(params, inv_n);
        }
      }
      opt.step(params, lr);
    }
    const double mean = total / static_cast<double>(dataset.size());
    if (!std::isfinite(mean)) throw NumericError("detector training produced a non-finite loss at epoch " + std::to_string(epoch));
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean, lr);
  }
  return result;
}

}  // namespace tsa
