// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "tsa/detector_training.hpp"
#include "tsa/labeling.hpp"
#include "tsa/metrics.hpp"
#include "tsa/mdc_network.hpp"
#include "tsa/proposal.hpp"
#include "tsa/synth.hpp"

namespace tsa::cli {

/// Every tunable of the pipeline. The text form is INI-like:
///
///   # comment
///   [section]
///   key = value
///
/// Unknown sections or keys, repeated keys and malformed values are
/// ConfigErrors. Keys that are absent keep their defaults.
///
/// One master seed drives everything: the synthetic data, the split, both
/// initialisations and both shuffles.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  SynthConfig synth;
  double val_fraction = 0.2;
  double inflation = kDefaultInflation;

  DetectorConfig detector;
  DetectorTrainConfig detector_train;
  PhiTrainConfig phi_train;
  ProposalConfig proposal;
  EvalSettings eval;

  /// Copies the master seed and thread count into the stage configs.
  void sync();
  void validate() const;
};

RunConfig parse_run_config(const std::string& text);
std::string format_run_config(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

}  // namespace tsa::cli
