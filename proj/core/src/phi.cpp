// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tsa/error.hpp"
#include "tsa/ops.hpp"
#include "tsa/proposal.hpp"

namespace tsa {

namespace {

double interpolate(std::span<const double> seq, double x) {
  const double last = static_cast<double>(seq.size() - 1);
  x = std::clamp(x, 0.0, last);
  const auto i0 = static_cast<std::size_t>(std::floor(x));
  if (i0 + 1 >= seq.size()) return seq[seq.size() - 1];
  const double f = x - static_cast<double>(i0);
  return seq[i0] * (1.0 - f) + seq[i0 + 1] * f;
}

ad::Tensor2D batch_tensor(std::span<const PhiFeatures> features) {
  ad::Tensor2D x(kPhiFeatureDim, features.size());
  for (std::size_t b = 0; b < features.size(); ++b) {
    for (std::size_t j = 0; j < kPhiFeatureDim; ++j) x(j, b) = features[b][j];
  }
  return x;
}

}  // namespace

PhiFeatures phi_features(std::size_t start, std::size_t end, const ProbabilityTriple& triple) {
  if (!(start < end)) throw DataError("phi_features needs start < end");
  if (triple.length() == 0) throw ShapeError("phi_features on an empty probability triple");
  const double s = static_cast<double>(start);
  const double e = static_cast<double>(end);
  const double center = (s + e) / 2.0;
  const double half = kPhiContextScale * (e - s) / 2.0;
  const double lo = center - half;
  const double step = 2.0 * half / static_cast<double>(kPhiSamplesPerSequence - 1);

  PhiFeatures out{};
  const std::array<std::span<const double>, 3> seqs{triple.start, triple.mid, triple.end};
  for (std::size_t q = 0; q < 3; ++q) {
    for (std::size_t i = 0; i < kPhiSamplesPerSequence; ++i) {
      const double x = lo + static_cast<double>(i) * step;
      out[q * kPhiSamplesPerSequence + i] = interpolate(seqs[q], x);
    }
  }
  return out;
}

PhiNetwork::PhiNetwork() {
  constexpr std::array<std::size_t, 4> dims{kPhiFeatureDim, 96, 48, 1};
  for (std::size_t l = 0; l < 3; ++l) {
    weight_[l] = params_.add("phi.fc" + std::to_string(l) + ".weight", {dims[l + 1], dims[l]});
    bias_[l] = params_.add("phi.fc" + std::to_string(l) + ".bias", {dims[l + 1]});
  }
}

void PhiNetwork::initialize(std::uint64_t seed) { glorot_initialize(params_, seed); }

ad::Var PhiNetwork::forward(ad::Tape& tape, ad::Var features) const {
  ad::Var h = ad::fully_connected(tape, features, params_[weight_[0]], params_[bias_[0]]);
  h = ad::relu(tape, h);
  h = ad::fully_connected(tape, h, params_[weight_[1]], params_[bias_[1]]);
  h = ad::relu(tape, h);
  h = ad::fully_connected(tape, h, params_[weight_[2]], params_[bias_[2]]);
  return ad::sigmoid(tape, h);
}

std::uint64_t PhiNetwork::digest() {
  // FNV-1a of the architecture string.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : std::string("phi:fc96-96,relu,fc96-48,relu,fc48-1,sigmoid")) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double phi_forward(std::span<const double> features, const PhiNetwork& net) {
  if (features.size() != kPhiFeatureDim) {
    throw ShapeError("phi_forward expects " + std::to_string(kPhiFeatureDim) + " features, got " +
                     std::to_string(features.size()));
  }
  ad::Tape tape;
  ad::Var x = tape.input(ad::Tensor2D::column(features));
  return tape.value(net.forward(tape, x)).values()[0];
}

std::vector<double> phi_forward_batch(std::span<const PhiFeatures> features, const PhiNetwork& net) {
  if (features.empty()) return {};
  ad::Tape tape;
  ad::Var x = tape.input(batch_tensor(features));
  const auto out = tape.value(net.forward(tape, x)).values();
  return {out.begin(), out.end()};
}

double phi_target(double start, double end, const AnnotationSet& annotations) {
  double best = 0.0;
  for (const auto& inst : annotations.instances) {
    best = std::max(best, iou_1d({start, end}, {inst.start, inst.end}));
  }
  return best;
}

PhiTrainResult train_phi(std::span<const PhiSample> samples, const PhiTrainConfig& cfg) {
  if (samples.empty()) throw DataError("train_phi needs at least one sample");
  if (cfg.batch_size == 0 || cfg.epochs == 0) throw ConfigError("phi batch size and epochs must be positive");
  for (const auto& s : samples) {
    if (!(s.target >= 0.0 && s.target <= 1.0)) throw DataError("phi targets must lie in [0, 1]");
  }

  PhiTrainResult result;
  result.network.initialize(cfg.seed);
  ad::ParamSet& params = result.network.params();
  ad::Optimizer opt(cfg.optimizer, cfg.momentum);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = cfg.lr.at(epoch);
    double total = 0.0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - b0);
      ad::Tensor2D x(kPhiFeatureDim, n);
      ad::Tensor2D y(1, n);
      for (std::size_t b = 0; b < n; ++b) {
        const PhiSample& s = samples[order[b0 + b]];
        for (std::size_t j = 0; j < kPhiFeatureDim; ++j) x(j, b) = s.features[j];
        y(0, b) = s.target;
      }
      ad::Tape tape;
      ad::Var in = tape.input(std::move(x));
      ad::Var loss = ad::smooth_l1_loss(tape, result.network.forward(tape, in), y);
      const double batch_loss = tape.value(loss).values()[0];
      if (!std::isfinite(batch_loss)) {
        throw NumericError("phi training diverged at epoch " + std::to_string(epoch));
      }
      total += batch_loss;
      ad::Var mean = ad::scale(tape, loss, 1.0 / static_cast<double>(n));
      ad::backward(tape, mean, params);
      opt.step(params, lr);
    }
    result.epoch_loss.push_back(total / static_cast<double>(samples.size()));
  }
  return result;
}

std::vector<PhiSample> build_phi_samples(const ProbabilityTriple& triple, const AnnotationSet& annotations,
                                         const PairingConfig& pairing, std::uint64_t seed) {
  CandidatePoints points{select_candidates(triple.start, pairing.point_threshold),
                         select_candidates(triple.end, pairing.point_threshold)};
  const auto pairs = pair_candidates(points, triple.mid, pairing);
  std::vector<PhiSample> positives;
  std::vector<PhiSample> negatives;
  for (const auto& [s, e] : pairs) {
    PhiSample sample;
    sample.target = phi_target(static_cast<double>(s), static_cast<double>(e), annotations);
    sample.features = phi_features(s, e, triple);
    (sample.target > 0.0 ? positives : negatives).push_back(sample);
  }
  if (negatives.size() > positives.size()) {
    std::mt19937_64 rng(seed);
    std::shuffle(negatives.begin(), negatives.end(), rng);
    negatives.resize(positives.size());
  }
  positives.insert(positives.end(), negatives.begin(), negatives.end());
  return positives;
}

}  // namespace tsa
