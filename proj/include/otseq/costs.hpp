/**
 * @file costs.hpp
 * @brief Semantic, positional, and fused cost matrices between segment sequences.
 */

#pragma once

#include "otseq/types.hpp"

namespace otseq {

// ============================================================================
// Configuration
// ============================================================================

/**
 * How the positional cost between segment indices is computed.
 *
 * NormalizedOffset evaluates exp(-(1/sigma^2) / (delta^2 + 1)) on the
 * normalized index offset delta = p/M1 - q/M2; the penalty grows with the
 * relative temporal distance and saturates at exp(0). The PE variants embed
 * each index as a vector (constant ramp or sinusoid table) and take Euclidean
 * distances between the encodings.
 */
enum class PositionalVariant { kNormalizedOffset, kUniformPe, kSinusoidPe };

struct PositionalConfig {
  double sigma = 1.2;  // scale of the offset penalty, > 0
  PositionalVariant variant = PositionalVariant::kNormalizedOffset;
  // Encoding width for the PE variants. 0 means "not resolved yet": distance
  // functions substitute the embedding dimension; direct calls must set it.
  int pe_dimension = 0;
};

struct FusionConfig {
  double alpha = 0.4;  // weight on the positional cost, >= 0
};

// ============================================================================
// Operations
// ============================================================================

/// Pairwise Euclidean distances: C[p,q] = ||a[p] - b[q]||.
Matrix semantic_cost(const SegmentSequence& a, const SegmentSequence& b);

/**
 * Positional cost over index pairs of an m1 x m2 alignment. Indices are
 * 1-based inside the formulas and each is normalized by its own sequence
 * length, so relative position lies in (0, 1] for either sequence.
 */
Matrix positional_cost(Index m1, Index m2, const PositionalConfig& cfg);

/// Entrywise C = semantic + alpha * positional.
Matrix fused_cost(const Matrix& semantic, const Matrix& positional, const FusionConfig& cfg);

}  // namespace otseq
