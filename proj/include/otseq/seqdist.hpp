/**
 * @file seqdist.hpp
 * @brief Sequence distances: fused-transport, mean-aggregation, and DTW.
 */

#pragma once

#include <utility>
#include <vector>

#include "otseq/costs.hpp"
#include "otseq/sinkhorn.hpp"
#include "otseq/types.hpp"

namespace otseq {

// ============================================================================
// Configuration
// ============================================================================

struct DistanceConfig {
  FusionConfig fusion;
  PositionalConfig positional;
  SinkhornConfig sinkhorn;
  // Empty marginals mean "uniform over the sequence length at call time";
  // non-empty ones must match the sequence lengths exactly.
  Marginal marginal_a;
  Marginal marginal_b;
  // When lambda_auto is set, sinkhorn.lambda is ignored and each call uses
  // lambda = lambda_multiplier / median(fused cost), so lambda * C is
  // scale-free. A fused median below 1e-12 (e.g. identical sequences with
  // alpha = 0) falls back to the bare multiplier.
  bool lambda_auto = true;
  double lambda_multiplier = 7.0;
};

struct SequenceDistanceResult {
  double value = 0.0;        // entropic transport value over the fused cost
  Matrix plan;               // optimal coupling between segment indices
  double lambda = 0.0;       // regularization actually used
  double linear_cost = 0.0;  // <plan, fused cost>
  int iterations_used = 0;
  bool converged = false;
};

// ============================================================================
// Operations
// ============================================================================

/// Median of all entries of a cost matrix (average of the two middle values
/// for an even count). Exposed for tests and for the lambda heuristic.
double cost_median(const Matrix& cost);

/**
 * Distance between two sequences as entropic optimal transport over
 * C = C_semantic + alpha * C_positional. Returns the plan alongside the
 * value so callers can inspect or visualize the coupling without a second
 * solve.
 */
SequenceDistanceResult cmot_distance(const SegmentSequence& a, const SegmentSequence& b,
                                     const DistanceConfig& cfg);

/**
 * Euclidean distance between per-sequence mean segments. The mean sums each
 * coordinate in sorted order, so any permutation of the same segments
 * produces the bitwise-identical mean and reversal-invariance holds exactly.
 */
double agg_distance(const SegmentSequence& a, const SegmentSequence& b);

/**
 * Classic hard dynamic time warping over the semantic cost table with moves
 * down, right, and diagonal, anchored at both corners. Returns the total
 * cost and one optimal path as 0-based index pairs from (0,0) to
 * (M1-1, M2-1). Cost ties prefer the diagonal move, then the row advance.
 */
std::pair<double, std::vector<std::pair<Index, Index>>> dtw_distance(const SegmentSequence& a,
                                                                     const SegmentSequence& b);

/// Minimum path cost by enumerating every monotone corner-to-corner path.
/// Oracle for dtw_distance; rejects sequences longer than 6.
double dtw_exhaustive(const SegmentSequence& a, const SegmentSequence& b);

}  // namespace otseq
