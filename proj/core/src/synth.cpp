// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tsa/error.hpp"

namespace tsa {

namespace {

constexpr int kPlacementAttempts = 100;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double envelope(double t, double start, double end, double ramp) {
  const double on = 0.5 + (t - start) / ramp;
  const double off = 0.5 + (end - t) / ramp;
  return std::clamp(std::min(on, off), 0.0, 1.0);
}

std::vector<std::vector<double>> unit_vectors(std::uint64_t seed, std::size_t count, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (auto& p : out) {
    double norm = 0.0;
    for (double& v : p) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : p) v /= norm;
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> class_patterns(const SynthConfig& cfg) {
  return unit_vectors(splitmix64(cfg.seed ^ 0xc1a55e5ull), cfg.class_count, cfg.feature_dim);
}

std::array<std::vector<double>, 2> phase_directions(const SynthConfig& cfg) {
  auto v = unit_vectors(splitmix64(cfg.seed ^ 0x9a5e9a5eull), 2, cfg.feature_dim);
  return {std::move(v[0]), std::move(v[1])};
}

void SynthConfig::validate() const {
  if (video_count == 0 || length == 0 || feature_dim == 0 || class_count == 0) {
    throw ConfigError("synth: video_count, length, feature_dim and class_count must be positive");
  }
  if (min_instances == 0 || min_instances > max_instances) {
    throw ConfigError("synth: need 1 <= min_instances <= max_instances");
  }
  if (!(min_duration > 0.0 && min_duration <= max_duration && max_duration < 1.0)) {
    throw ConfigError("synth: duration range must satisfy 0 < min <= max < 1");
  }
  if (!(noise_std >= 0.0) || !(signal_strength >= 0.0) || !(phase_strength >= 0.0)) {
    throw ConfigError("synth: noise_std, signal_strength and phase_strength must be >= 0");
  }
  if (min_duration_snippets(*this) < 1) throw ConfigError("synth: minimum duration rounds to zero snippets");
}

std::size_t min_duration_snippets(const SynthConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.min_duration * static_cast<double>(cfg.length)));
}

std::size_t max_duration_snippets(const SynthConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.max_duration * static_cast<double>(cfg.length)));
}

double duration_probability(const SynthConfig& cfg, std::size_t duration) {
  const double lo = cfg.min_duration * static_cast<double>(cfg.length);
  const double hi = cfg.max_duration * static_cast<double>(cfg.length);
  if (hi == lo) return std::llround(lo) == static_cast<long long>(duration) ? 1.0 : 0.0;
  const double a = std::max(lo, static_cast<double>(duration) - 0.5);
  const double b = std::min(hi, static_cast<double>(duration) + 0.5);
  if (b <= a) return 0.0;
  return (std::log(b) - std::log(a)) / (std::log(hi) - std::log(lo));
}


SyntheticVideo generate_video(const SynthConfig& cfg, std::size_t index) {
  cfg.validate();
  std::mt19937_64 rng(splitmix64(cfg.seed * 0x100000001b3ull + index));
  const std::size_t T = cfg.length;
  const double lo = cfg.min_duration * static_cast<double>(T);
  const double hi = cfg.max_duration * static_cast<double>(T);

  std::uniform_int_distribution<std::size_t> count_dist(cfg.min_instances, cfg.max_instances);
  std::uniform_real_distribution<double> log_dur(std::log(lo), std::log(hi));
  std::uniform_int_distribution<int> class_dist(0, static_cast<int>(cfg.class_count) - 1);

  const std::size_t n = count_dist(rng);
  std::vector<std::size_t> durations;
  bool placed = false;
  for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
    durations.clear();
    std::size_t footprint = 0;  // an instance [s, s + L] covers L + 1 snippets
    for (std::size_t k = 0; k < n; ++k) {
      const auto L = static_cast<std::size_t>(std::llround(std::exp(log_dur(rng))));
      durations.push_back(std::max<std::size_t>(L, 1));
      footprint += durations.back() + 1;
    }
    // n - 1 separating snippets between consecutive instances
    placed = footprint + (n - 1) <= T;
  }
  if (!placed) {
    throw DataError("synth: cannot pack " + std::to_string(n) + " instances into T=" + std::to_string(T) +
                    " after " + std::to_string(kPlacementAttempts) + " attempts");
  }

  // Spread the free snippets over the n + 1 gaps.
  std::size_t used = n - 1;
  for (std::size_t L : durations) used += L + 1;
  const std::size_t free = T - used;
  std::uniform_int_distribution<std::size_t> cut_dist(0, free);
  std::vector<std::size_t> cuts(n);
  for (auto& c : cuts) c = cut_dist(rng);
  std::sort(cuts.begin(), cuts.end());

  SyntheticVideo video;
  video.annotations.video_id = "video_" + std::to_string(index);
  video.annotations.length = T;
  video.annotations.stride = cfg.stride;
  std::size_t cursor = 0;
  std::size_t prev_cut = 0;
  for (std::size_t k = 0; k < n; ++k) {
    cursor += cuts[k] - prev_cut;
    prev_cut = cuts[k];
    const std::size_t start = cursor;
    const std::size_t end = start + durations[k];
    video.annotations.instances.push_back({static_cast<double>(start), static_cast<double>(end), class_dist(rng)});
    cursor = end + 2;
  }

  const auto patterns = class_patterns(cfg);
  const auto phase = phase_directions(cfg);
  constexpr double kPi = 3.14159265358979323846;
  ad::Tensor2D x(cfg.feature_dim, T);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& v : x.values()) v = cfg.noise_std * noise(rng);
  for (const auto& inst : video.annotations.instances) {
    const double ramp = std::max(1.0, std::round(0.05 * inst.duration()));
    const auto& p = patterns[static_cast<std::size_t>(inst.class_id)];
    const auto t0 = static_cast<std::size_t>(std::max(0.0, std::floor(inst.start - ramp)));
    const auto t1 = std::min(T - 1, static_cast<std::size_t>(std::ceil(inst.end + ramp)));
    for (std::size_t t = t0; t <= t1; ++t) {
      const double env = envelope(static_cast<double>(t), inst.start, inst.end, ramp);
      if (env <= 0.0) continue;
      const double u = std::clamp((static_cast<double>(t) - inst.start) / inst.duration(), 0.0, 1.0);
      const double a = cfg.phase_strength * env * std::cos(kPi * u);
      const double b = cfg.phase_strength * env * std::sin(kPi * u);
      for (std::size_t d = 0; d < cfg.feature_dim; ++d) {
        x(d, t) += cfg.signal_strength * env * p[d] + a * phase[0][d] + b * phase[1][d];
      }
    }
  }
  video.features = FeatureSequence{video.annotations.video_id, cfg.stride, std::move(x)};
  return video;
}

std::vector<SyntheticVideo> generate_dataset(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<SyntheticVideo> out;
  out.reserve(cfg.video_count);
  for (std::size_t i = 0; i < cfg.video_count; ++i) out.push_back(generate_video(cfg, i));
  return out;
}

}  // namespace tsa
