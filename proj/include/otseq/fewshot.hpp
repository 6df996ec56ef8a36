/**
 * @file fewshot.hpp
 * @brief Episodic N-way K-shot protocol: class means, softmax prediction,
 *        cross-entropy loss, and benchmark aggregation.
 */

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "otseq/types.hpp"

namespace otseq {

// ============================================================================
// Domain types
// ============================================================================

struct LabeledSequence {
  SegmentSequence sequence;
  int label = 0;
};

/**
 * One few-shot task: a labeled support set with exactly k_shot instances for
 * each of n_way distinct labels, and a query set of n_way * q_per_class
 * instances whose labels all appear in the support.
 */
struct Episode {
  std::vector<LabeledSequence> support;
  std::vector<LabeledSequence> query;
  int n_way = 0;
  int k_shot = 0;
  int q_per_class = 0;

  void validate() const;

  /// Distinct support labels in order of first appearance; fixes the class
  /// axis of every per-class vector produced from this episode.
  std::vector<int> class_order() const;
};

struct PredictionRecord {
  Vector per_class_mean_distance;
  Vector probabilities;
  int predicted_label = 0;
  int true_label = 0;
  bool tie_broken = false;  // argmin was shared and resolved to the lowest class index
};

struct BenchmarkReport {
  double mean_accuracy = 0.0;
  double ci95_halfwidth = 0.0;
  std::vector<double> per_episode_accuracies;
  int episode_count = 0;
  int tie_count = 0;  // argmin ties encountered across all queries
  std::string config_snapshot;
};

/// Any sequence-to-sequence distance; value component only.
using SequenceMetric = std::function<double(const SegmentSequence&, const SegmentSequence&)>;

// ============================================================================
// Operations
// ============================================================================

/// Mean metric value from the query to each class's support instances,
/// ordered by first appearance of the class in the support list.
Vector class_mean_distance(const SegmentSequence& query, const Episode& episode,
                           const SequenceMetric& metric);

/// Softmax of negated distances, computed with max-subtraction.
Vector predict_proba(const Vector& distances);

/// Full prediction bookkeeping for one query; ties in the distance argmin
/// resolve to the lowest class index.
PredictionRecord classify_query(const SegmentSequence& query, int true_label,
                                const Episode& episode, const SequenceMetric& metric);

/// Cross-entropy over the episode's query set: sum of -log p(true label).
double episode_loss(const Episode& episode, const SequenceMetric& metric);

/// Evaluates every episode and aggregates per-episode accuracies with a
/// 95% confidence halfwidth (1.96 * sample stddev / sqrt(episode count)).
BenchmarkReport evaluate_benchmark(const std::vector<Episode>& episodes,
                                   const SequenceMetric& metric);

}  // namespace otseq
