// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsa/autodiff.hpp"
#include "tsa/labeling.hpp"
#include "tsa/mdc_network.hpp"
#include "tsa/metrics.hpp"
#include "tsa/optimizer.hpp"

namespace tsa {

// Candidate selection and pairing ----------------------------------------------

/// Indices t with P(t) > threshold, united with strict interior local maxima
/// P(t-1) < P(t) > P(t+1). Sorted, no duplicates. Plateaus are not maxima.
std::vector<std::size_t> select_candidates(std::span<const double> probs, double threshold);

struct CandidatePoints {
  std::vector<std::size_t> starts;
  std::vector<std::size_t> ends;
};

struct PairingConfig {
  double d_min = 1.0;
  double d_max = 1e9;
  double mid_threshold = 0.5;    // tau_mid
  double point_threshold = 0.9;  // threshold used by select_candidates

  void validate() const;
};

/// Index of the mid point of (start, end), rounded half up.
std::size_t mid_index(std::size_t start, std::size_t end);

/// All (s, e) with s < e, d_min <= e - s <= d_max and
/// P_mid(round((s + e) / 2)) >= mid_threshold, ordered by (s, e).
std::vector<std::pair<std::size_t, std::size_t>> pair_candidates(const CandidatePoints& points,
                                                                 std::span<const double> mid_probs,
                                                                 const PairingConfig& cfg);

/// (min, max) of instance durations over a training set; rejects no instances.
std::pair<double, double> duration_stats(const std::vector<AnnotationSet>& training);

// Proposals ---------------------------------------------------------------------

struct Proposal {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t mid = 0;
  double score = 0.0;
  double p_start = 0.0;
  double p_end = 0.0;
  double phi = 0.0;
  int class_id = -1;  // optional label carried to the detection evaluator

  Segment segment() const { return {static_cast<double>(start), static_cast<double>(end)}; }
};

/// P(s) * P(e) * phi.
inline double bayesian_score(double p_start, double p_end, double phi) { return p_start * p_end * phi; }

/// Sorts by score descending, then earlier start, then earlier end.
void sort_by_score(std::vector<Proposal>& proposals);

// Compatibility network phi -------------------------------------------------------

inline constexpr std::size_t kPhiSamplesPerSequence = 32;
inline constexpr std::size_t kPhiFeatureDim = 3 * kPhiSamplesPerSequence;
/// The segment is stretched to this multiple of its length before sampling.
inline constexpr double kPhiContextScale = 1.4;

using PhiFeatures = std::array<double, kPhiFeatureDim>;

/// Reads P^(s), P^(i), P^(e) at 32 evenly spaced positions (both ends
/// included) over the segment stretched symmetrically to 1.4x its length,
/// with linear interpolation and clamping to [0, T - 1].
PhiFeatures phi_features(std::size_t start, std::size_t end, const ProbabilityTriple& triple);

/// FC(96->96) ReLU FC(96->48) ReLU FC(48->1) sigmoid.
class PhiNetwork {
 public:
  PhiNetwork();

  ad::ParamSet& params() noexcept { return params_; }
  const ad::ParamSet& params() const noexcept { return params_; }
  void initialize(std::uint64_t seed);

  /// features: 96 x batch. Returns 1 x batch probabilities.
  ad::Var forward(ad::Tape& tape, ad::Var features) const;

  /// Checkpoint digest of the fixed architecture.
  static std::uint64_t digest();

 private:
  ad::ParamSet params_;
  std::array<std::size_t, 3> weight_{};
  std::array<std::size_t, 3> bias_{};
};

double phi_forward(std::span<const double> features, const PhiNetwork& net);
/// phi for many feature vectors in one pass.
std::vector<double> phi_forward_batch(std::span<const PhiFeatures> features, const PhiNetwork& net);

/// sup over ground-truth instances of IoU with [start, end]; 0 if none.
double phi_target(double start, double end, const AnnotationSet& annotations);

struct PhiSample {
  PhiFeatures features{};
  double target = 0.0;
};

struct PhiTrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  LearningRateSchedule lr;
  ad::OptimizerKind optimizer = ad::OptimizerKind::kAdam;
  double momentum = 0.0;  // SGD only
  std::uint64_t seed = 0;
};

struct PhiTrainResult {
  PhiNetwork network;
  std::vector<double> epoch_loss;  // mean smooth-L1 per sample
};

/// Minimises the mean smooth-L1 between phi and the targets over shuffled
/// minibatches.
PhiTrainResult train_phi(std::span<const PhiSample> samples, const PhiTrainConfig& cfg);

/// Training pairs for phi from one video: every pairing of its candidates,
/// labelled by phi_target. Pairs with zero IoU are subsampled (seeded) down
/// to the number of overlapping pairs.
std::vector<PhiSample> build_phi_samples(const ProbabilityTriple& triple, const AnnotationSet& annotations,
                                         const PairingConfig& pairing, std::uint64_t seed);

// Redundancy removal ---------------------------------------------------------------

/// Keeps the best remaining proposal and discards all others with
/// IoU > iou_threshold against it, repeatedly. Output sorted by score.
std::vector<Proposal> greedy_nms(std::vector<Proposal> proposals, double iou_threshold);

/// Gaussian soft-NMS: each round takes the best unprocessed proposal and
/// multiplies every other unprocessed score by exp(-IoU^2 / sigma). Proposals
/// ending below score_floor are dropped. Output sorted by the decayed scores.
std::vector<Proposal> soft_nms(std::vector<Proposal> proposals, double sigma, double score_floor);

enum class NmsMethod { kGreedy, kSoft };

NmsMethod parse_nms_method(const std::string& name);
std::string to_string(NmsMethod method);

struct ProposalConfig {
  PairingConfig pairing;
  NmsMethod nms = NmsMethod::kSoft;
  double nms_iou_threshold = 0.8;
  double soft_sigma = 0.5;
  double soft_floor = 0.001;
  std::size_t top_k = 200;
};

/// Scored (pre-NMS) proposals of one video from its probability triple.
std::vector<Proposal> score_proposals(const ProbabilityTriple& triple, const PairingConfig& pairing,
                                      const PhiNetwork& phi);

/// score_proposals, then NMS and top-K.
std::vector<Proposal> generate_proposals(const ProbabilityTriple& triple, const ProposalConfig& cfg,
                                         const PhiNetwork& phi);

// Proposal file ---------------------------------------------------------------------
//
// One line per proposal, tab separated:
//   video_id  start  end  score  p_start  p_end  phi  [class_id]
// sorted by score descending within each video; videos in input order.

struct VideoProposals {
  std::string video_id;
  std::vector<Proposal> proposals;
};

std::string format_proposals(const std::vector<VideoProposals>& videos);
std::vector<VideoProposals> parse_proposals(const std::string& text);
void write_proposal_file(const std::string& path, const std::vector<VideoProposals>& videos);
std::vector<VideoProposals> read_proposal_file(const std::string& path);

/// Adapter for the evaluator.
std::vector<VideoPredictions> to_predictions(const std::vector<VideoProposals>& videos);

}  // namespace tsa
