/**
 * @file fewshot.cpp
 * @brief Episodic protocol implementation.
 */

#include "otseq/fewshot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace otseq {

void Episode::validate() const {
  if (n_way < 2 || k_shot < 1 || q_per_class < 1) {
    throw std::invalid_argument("Episode: need n_way >= 2, k_shot >= 1, q_per_class >= 1");
  }
  if (static_cast<int>(support.size()) != n_way * k_shot) {
    throw std::invalid_argument("Episode: support size must be n_way * k_shot");
  }
  if (static_cast<int>(query.size()) != n_way * q_per_class) {
    throw std::invalid_argument("Episode: query size must be n_way * q_per_class");
  }
  std::map<int, int> counts;
  for (const auto& item : support) {
    ++counts[item.label];
  }
  if (static_cast<int>(counts.size()) != n_way) {
    throw std::invalid_argument("Episode: support must contain n_way distinct labels");
  }
  for (const auto& [label, count] : counts) {
    if (count != k_shot) {
      throw std::invalid_argument("Episode: every support label needs exactly k_shot instances");
    }
  }
  for (const auto& item : query) {
    if (counts.find(item.label) == counts.end()) {
      throw std::invalid_argument("Episode: query label missing from the support set");
    }
  }
}

std::vector<int> Episode::class_order() const {
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n_way));
  for (const auto& item : support) {
    if (std::find(order.begin(), order.end(), item.label) == order.end()) {
      order.push_back(item.label);
    }
  }
  return order;
}

Vector class_mean_distance(const SegmentSequence& query, const Episode& episode,
                           const SequenceMetric& metric) {
  episode.validate();
  const std::vector<int> order = episode.class_order();
  Vector means = Vector::Zero(static_cast<Index>(order.size()));
  for (size_t n = 0; n < order.size(); ++n) {
    double sum = 0.0;
    int count = 0;
    for (const auto& item : episode.support) {
      if (item.label == order[n]) {
        sum += metric(item.sequence, query);
        ++count;
      }
    }
    if (count == 0) {
      throw std::invalid_argument("class_mean_distance: class with no support instances");
    }
    means(static_cast<Index>(n)) = sum / count;
  }
  return means;
}

Vector predict_proba(const Vector& distances) {
  if (distances.size() < 1 || !distances.allFinite()) {
    throw std::invalid_argument("predict_proba: distances must be non-empty and finite");
  }
  const Vector logits = -distances;
  const Vector shifted = logits.array() - logits.maxCoeff();
  const Vector weights = shifted.array().exp();
  return weights / weights.sum();
}

PredictionRecord classify_query(const SegmentSequence& query, int true_label,
                                const Episode& episode, const SequenceMetric& metric) {
  PredictionRecord record;
  record.per_class_mean_distance = class_mean_distance(query, episode, metric);
  record.probabilities = predict_proba(record.per_class_mean_distance);
  record.true_label = true_label;

  const std::vector<int> order = episode.class_order();
  Index best = 0;
  for (Index n = 1; n < record.per_class_mean_distance.size(); ++n) {
    if (record.per_class_mean_distance(n) < record.per_class_mean_distance(best)) {
      best = n;
    } else if (record.per_class_mean_distance(n) == record.per_class_mean_distance(best)) {
      record.tie_broken = true;
    }
  }
  record.predicted_label = order[static_cast<size_t>(best)];
  return record;
}

double episode_loss(const Episode& episode, const SequenceMetric& metric) {
  episode.validate();
  const std::vector<int> order = episode.class_order();
  double loss = 0.0;
  for (const auto& item : episode.query) {
    const Vector distances = class_mean_distance(item.sequence, episode, metric);
    const auto target =
        std::find(order.begin(), order.end(), item.label) - order.begin();
    // -log softmax(-d)[target], evaluated in log space.
    const Vector logits = -distances;
    const double peak = logits.maxCoeff();
    const double log_norm = peak + std::log((logits.array() - peak).exp().sum());
    loss += log_norm - logits(static_cast<Index>(target));
  }
  return loss;
}

BenchmarkReport evaluate_benchmark(const std::vector<Episode>& episodes,
                                   const SequenceMetric& metric) {
  if (episodes.size() < 2) {
    throw std::invalid_argument("evaluate_benchmark: need at least 2 episodes");
  }
  BenchmarkReport report;
  report.episode_count = static_cast<int>(episodes.size());
  report.per_episode_accuracies.reserve(episodes.size());
  for (const auto& episode : episodes) {
    episode.validate();
    int correct = 0;
    for (const auto& item : episode.query) {
      const PredictionRecord record =
          classify_query(item.sequence, item.label, episode, metric);
      correct += record.predicted_label == item.label ? 1 : 0;
      report.tie_count += record.tie_broken ? 1 : 0;
    }
    report.per_episode_accuracies.push_back(static_cast<double>(correct) /
                                            static_cast<double>(episode.query.size()));
  }

  double sum = 0.0;
  for (const double accuracy : report.per_episode_accuracies) {
    sum += accuracy;
  }
  report.mean_accuracy = sum / report.episode_count;

  double sq = 0.0;
  for (const double accuracy : report.per_episode_accuracies) {
    const double d = accuracy - report.mean_accuracy;
    sq += d * d;
  }
  const double sample_stddev = std::sqrt(sq / (report.episode_count - 1));
  report.ci95_halfwidth = 1.96 * sample_stddev / std::sqrt(report.episode_count);
  return report;
}

}  // namespace otseq
