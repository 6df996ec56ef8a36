/**
 * @file synthgen.hpp
 * @brief Synthetic sequence benchmark: prototype class banks and reversal
 *        label regimes for content- vs ordering-dominated episodes.
 */

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "otseq/fewshot.hpp"
#include "otseq/types.hpp"

namespace otseq {

// ============================================================================
// Domain types
// ============================================================================

/**
 * Labeling regime for sampled episodes. Content-dominated: a sequence and its
 * reversal share a label, and every instance is independently presented
 * forward or reversed with probability 1/2. Ordering-dominated: the reversal
 * is a class of its own, doubling the label space (labels C..2C-1 are the
 * reversed versions of base classes 0..C-1).
 */
enum class Regime { kContentDominated, kOrderingDominated };

struct GeneratorConfig {
  int n_classes = 5;
  int m_segments = 4;
  int dim = 8;
  double noise_sigma = 0.05;
  Regime regime = Regime::kContentDominated;
  std::uint64_t rng_seed = 0;
};

/// Per-class ordered prototype tuples (one m_segments x dim matrix per class).
struct ClassBank {
  std::vector<Matrix> classes;
  std::uint64_t rng_seed = 0;

  int n_classes() const { return static_cast<int>(classes.size()); }
};

// ============================================================================
// Operations
// ============================================================================

/**
 * Samples the class prototype tuples: unit-normal entries, each prototype
 * normalized to unit length. Deterministic per seed. Tuples that equal their
 * own reversal, repeat a prototype, or collide with an earlier class are
 * rejected and resampled, so the reversal regime is always well posed.
 */
ClassBank generate_class_bank(const GeneratorConfig& cfg);

/// Prototype tuple of one class plus independent per-coordinate noise.
SegmentSequence sample_sequence(const ClassBank& bank, int class_index, double noise_sigma,
                                std::mt19937_64& rng);

/// Segments in reverse order; vectors untouched.
SegmentSequence reverse_sequence(const SegmentSequence& a);

/// Number of distinct labels the regime exposes over this bank.
int label_count(const ClassBank& bank, Regime regime);

/**
 * Samples one episode: n_way distinct labels drawn from the regime's label
 * space, then k_shot support and q query instances per label.
 */
Episode build_episode(const ClassBank& bank, const GeneratorConfig& cfg, int n_way, int k_shot,
                      int q, std::mt19937_64& rng);

}  // namespace otseq
