// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tsa/labeling.hpp"
#include "tsa/tensor.hpp"

namespace tsa {

/// Snippet features of one video: a D x T matrix plus the frame stride used
/// when the snippets were cut.
struct FeatureSequence {
  std::string video_id;
  std::uint32_t stride = 1;
  ad::Tensor2D features;

  std::size_t length() const noexcept { return features.time(); }
  std::size_t dim() const noexcept { return features.channels(); }
  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;
};

struct SyntheticVideo {
  FeatureSequence features;
  AnnotationSet annotations;
};

struct SynthConfig {
  std::size_t video_count = 250;
  std::size_t length = 256;       // T
  std::size_t feature_dim = 16;   // D
  std::size_t min_instances = 1;
  std::size_t max_instances = 4;
  double min_duration = 0.04;     // fraction of T
  double max_duration = 0.40;
  std::size_t class_count = 5;
  double noise_std = 0.4;
  double signal_strength = 1.0;
  // Weight of the class-agnostic progress component: inside an instance the
  // features also carry cos(pi u) q1 + sin(pi u) q2, u = (t - start) / L.
  // 0 disables it.
  double phase_strength = 0.5;
  std::uint32_t stride = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Smallest / largest integer duration the generator can emit for `cfg`.
std::size_t min_duration_snippets(const SynthConfig& cfg);
std::size_t max_duration_snippets(const SynthConfig& cfg);

/// Probability of drawing integer duration L: log-uniform on
/// [min_duration * T, max_duration * T], rounded to the nearest integer.
double duration_probability(const SynthConfig& cfg, std::size_t duration);

/// Unit-norm pattern vector of each class (depends only on seed and D).
std::vector<std::vector<double>> class_patterns(const SynthConfig& cfg);

/// The two unit-norm progress directions q1, q2 shared by all classes.
std::array<std::vector<double>, 2> phase_directions(const SynthConfig& cfg);

/// Deterministic synthetic dataset. Each video gets 1..n non-overlapping
/// instances (at least one free snippet between them) with log-uniform
/// durations; features are Gaussian noise plus, inside every instance, its
/// class pattern scaled by signal_strength and a trapezoid envelope whose
/// ramps (width max(1, 5% of the duration)) are centred on the boundaries,
/// plus the progress component weighted by phase_strength under the same
/// envelope.
std::vector<SyntheticVideo> generate_dataset(const SynthConfig& cfg);

/// Generates video `index` alone; identical to generate_dataset(cfg)[index].
SyntheticVideo generate_video(const SynthConfig& cfg, std::size_t index);

// Feature file -----------------------------------------------------------------
//
// A sequence of records, one per video, all little endian:
//   "TSAF"  magic, 4 bytes
//   u16     version (1)
//   u32     id length, then the id bytes
//   u32 T, u32 D, u32 stride
//   f64     D x T values, row-major (feature dimension major)

inline constexpr std::uint16_t kFeatureFileVersion = 1;

std::size_t feature_record_size(const FeatureSequence& seq);
std::string encode_features(const std::vector<FeatureSequence>& videos);
std::vector<FeatureSequence> decode_features(const std::string& bytes);
void write_feature_file(const std::string& path, const std::vector<FeatureSequence>& videos);
std::vector<FeatureSequence> read_feature_file(const std::string& path);

}  // namespace tsa
