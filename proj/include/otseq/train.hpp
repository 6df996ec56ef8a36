/**
 * @file train.hpp
 * @brief Trainable linear segment embedding with episodic cross-entropy
 *        optimization through the transport solver.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "otseq/fewshot.hpp"
#include "otseq/seqdist.hpp"
#include "otseq/serialize.hpp"
#include "otseq/types.hpp"

namespace otseq {

// ============================================================================
// Domain types
// ============================================================================

/// Per-segment affine map v -> weight * v + bias.
struct LinearEmbedding {
  Matrix weight;  // rows: output dimension, cols: input dimension
  Vector bias;    // one entry per output dimension

  static LinearEmbedding identity(Index dim);

  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.01;  // zero is allowed and leaves parameters untouched
  double decay_factor = 1.0;    // multiplied into the rate every decay_every episodes
  int decay_every = 2000;
  int total_episodes = 1000;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct LossGradient {
  double loss = 0.0;
  Matrix weight_gradient;
  Vector bias_gradient;
  // Cost entries whose semantic distance was (numerically) zero get the zero
  // subgradient instead of an undefined direction; they are counted here.
  int zero_distance_entries = 0;
  // Solves that stopped on the iteration budget rather than the tolerance.
  int nonconverged_solves = 0;
};

struct TrainResult {
  LinearEmbedding embedding;
  std::vector<double> loss_history;  // one entry per episode, pre-update
  std::string final_rng_state;       // episode stream state after the last draw
  long long total_solves = 0;        // transport solves across all episodes
  long long nonconverged_solves = 0;
};

/// Draws the next training episode from a caller-owned stream.
using EpisodeSource = std::function<Episode(std::mt19937_64&)>;

/// Resumable training state.
struct Checkpoint {
  LinearEmbedding embedding;
  int episode = 0;
  std::string rng_state;  // text serialization of the mt19937_64 engine
};

// ============================================================================
// Operations
// ============================================================================

/// Applies the affine map to every segment, preserving order.
SegmentSequence embed(const SegmentSequence& raw, const LinearEmbedding& emb);

/**
 * Episode cross-entropy and its gradient with respect to the embedding
 * parameters. The chain runs softmax coefficients -> transport plan (as the
 * gradient of the solver value in its cost matrix) -> semantic cost ->
 * affine map. Positional costs do not depend on the parameters, so they
 * contribute value but no gradient; the bias cancels out of every semantic
 * difference, so its gradient is exactly zero. The per-pair lambda heuristic
 * is treated as a constant of the solve.
 */
LossGradient loss_gradient(const Episode& episode, const LinearEmbedding& emb,
                           const DistanceConfig& cfg);

/**
 * Plain SGD over episodes drawn from the source. The learning rate is
 * multiplied by decay_factor every decay_every episodes. Throws when the
 * loss exceeds ten times its initial value for 100 consecutive episodes.
 */
TrainResult train_loop(const EpisodeSource& source, const LinearEmbedding& start,
                       const TrainConfig& tcfg, const DistanceConfig& dcfg);

// ============================================================================
// Checkpoints and engine state
// ============================================================================

std::string rng_state_string(const std::mt19937_64& rng);
std::mt19937_64 rng_from_state(const std::string& state);

Json embedding_to_json(const LinearEmbedding& emb);
LinearEmbedding embedding_from_json(const Json& j);

Json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const Json& j);

}  // namespace otseq
