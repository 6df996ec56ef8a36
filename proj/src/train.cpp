/**
 * @file train.cpp
 * @brief Episodic embedding training.
 */

#include "otseq/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace otseq {

namespace {

constexpr double kZeroDistance = 1e-12;

void check_finite_matrix(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": entries must be finite");
  }
}

}  // namespace

LinearEmbedding LinearEmbedding::identity(Index dim) {
  LinearEmbedding emb;
  emb.weight = Matrix::Identity(dim, dim);
  emb.bias = Vector::Zero(dim);
  return emb;
}

void LinearEmbedding::validate() const {
  if (weight.rows() < 1 || weight.cols() < 1) {
    throw std::invalid_argument("LinearEmbedding: weight must be non-empty");
  }
  if (bias.size() != weight.rows()) {
    throw std::invalid_argument("LinearEmbedding: bias length must match weight rows");
  }
  check_finite_matrix(weight, "LinearEmbedding weight");
  if (!bias.allFinite()) {
    throw std::invalid_argument("LinearEmbedding bias: entries must be finite");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be finite and non-negative");
  }
  if (!(decay_factor > 0.0) || decay_factor > 1.0) {
    throw std::invalid_argument("TrainConfig: decay_factor must lie in (0, 1]");
  }
  if (decay_every < 1 || total_episodes < 1) {
    throw std::invalid_argument("TrainConfig: decay_every and total_episodes must be positive");
  }
}

SegmentSequence embed(const SegmentSequence& raw, const LinearEmbedding& emb) {
  emb.validate();
  if (raw.dim() != emb.weight.cols()) {
    throw std::invalid_argument("embed: weight columns must match the segment dimension");
  }
  Matrix out = raw.data() * emb.weight.transpose();
  out.rowwise() += emb.bias.transpose();
  return SegmentSequence(std::move(out));
}

LossGradient loss_gradient(const Episode& episode, const LinearEmbedding& emb,
                           const DistanceConfig& cfg) {
  episode.validate();
  emb.validate();

  LossGradient out;
  out.weight_gradient = Matrix::Zero(emb.weight.rows(), emb.weight.cols());
  out.bias_gradient = Vector::Zero(emb.weight.rows());

  const std::vector<int> order = episode.class_order();
  const auto class_index = [&order](int label) {
    return static_cast<size_t>(std::find(order.begin(), order.end(), label) - order.begin());
  };

  std::vector<SegmentSequence> support_embedded;
  support_embedded.reserve(episode.support.size());
  for (const auto& item : episode.support) {
    support_embedded.push_back(embed(item.sequence, emb));
  }

  struct PairSolve {
    size_t support_index;
    size_t class_idx;
    SequenceDistanceResult solved;
  };

  for (const auto& query_item : episode.query) {
    const SegmentSequence query_embedded = embed(query_item.sequence, emb);

    Vector dis = Vector::Zero(static_cast<Index>(order.size()));
    std::vector<PairSolve> pairs;
    pairs.reserve(episode.support.size());
    for (size_t s = 0; s < episode.support.size(); ++s) {
      SequenceDistanceResult solved =
          cmot_distance(support_embedded[s], query_embedded, cfg);
      out.nonconverged_solves += solved.converged ? 0 : 1;
      const size_t n = class_index(episode.support[s].label);
      dis(static_cast<Index>(n)) += solved.value / episode.k_shot;
      pairs.push_back({s, n, std::move(solved)});
    }

    const Vector probabilities = predict_proba(dis);
    const auto target = static_cast<Index>(class_index(query_item.label));
    const Vector logits = -dis;
    const double peak = logits.maxCoeff();
    out.loss += peak + std::log((logits.array() - peak).exp().sum()) - logits(target);

    for (const PairSolve& pair : pairs) {
      const Index n = static_cast<Index>(pair.class_idx);
      const double indicator = n == target ? 1.0 : 0.0;
      const double coefficient =
          (indicator - probabilities(n)) / episode.k_shot;
      const SegmentSequence& sup_raw = episode.support[pair.support_index].sequence;
      const SegmentSequence& sup_emb = support_embedded[pair.support_index];
      const Matrix& plan = pair.solved.plan;
      for (Index p = 0; p < plan.rows(); ++p) {
        for (Index q = 0; q < plan.cols(); ++q) {
          const Vector difference = sup_emb.segment(p) - query_embedded.segment(q);
          const double norm = difference.norm();
          if (norm <= kZeroDistance) {
            ++out.zero_distance_entries;
            continue;
          }
          const Vector direction = difference / norm;
          const Vector raw_difference =
              sup_raw.segment(p) - query_item.sequence.segment(q);
          out.weight_gradient.noalias() +=
              (coefficient * plan(p, q)) * direction * raw_difference.transpose();
        }
      }
    }
  }
  return out;
}

TrainResult train_loop(const EpisodeSource& source, const LinearEmbedding& start,
                       const TrainConfig& tcfg, const DistanceConfig& dcfg) {
  if (!source) {
    throw std::invalid_argument("train_loop: episode source must be callable");
  }
  tcfg.validate();
  start.validate();

  std::mt19937_64 rng(tcfg.rng_seed);
  TrainResult result;
  result.embedding = start;
  result.loss_history.reserve(static_cast<size_t>(tcfg.total_episodes));

  double rate = tcfg.learning_rate;
  double initial_loss = 0.0;
  int over_budget_streak = 0;
  for (int e = 0; e < tcfg.total_episodes; ++e) {
    if (e > 0 && e % tcfg.decay_every == 0) {
      rate *= tcfg.decay_factor;
    }
    const Episode episode = source(rng);
    const LossGradient grad = loss_gradient(episode, result.embedding, dcfg);
    result.total_solves +=
        static_cast<long long>(episode.support.size()) * static_cast<long long>(episode.query.size());
    result.nonconverged_solves += grad.nonconverged_solves;
    if (e == 0) {
      initial_loss = grad.loss;
    }
    result.loss_history.push_back(grad.loss);

    if (grad.loss > 10.0 * initial_loss) {
      if (++over_budget_streak >= 100) {
        throw std::runtime_error(
            "train_loop: loss stayed above 10x its initial value for 100 episodes");
      }
    } else {
      over_budget_streak = 0;
    }

    result.embedding.weight -= rate * grad.weight_gradient;
    result.embedding.bias -= rate * grad.bias_gradient;
  }
  result.final_rng_state = rng_state_string(rng);
  return result;
}

std::string rng_state_string(const std::mt19937_64& rng) {
  std::ostringstream stream;
  stream << rng;
  return stream.str();
}

std::mt19937_64 rng_from_state(const std::string& state) {
  std::mt19937_64 rng;
  std::istringstream stream(state);
  stream >> rng;
  if (stream.fail()) {
    throw std::invalid_argument("rng_from_state: unparsable engine state");
  }
  return rng;
}

Json embedding_to_json(const LinearEmbedding& emb) {
  emb.validate();
  Json bias = Json::array();
  for (Index i = 0; i < emb.bias.size(); ++i) {
    bias.push_back(emb.bias(i));
  }
  return Json{{"weight", matrix_to_json(emb.weight)}, {"bias", std::move(bias)}};
}

LinearEmbedding embedding_from_json(const Json& j) {
  LinearEmbedding emb;
  emb.weight = matrix_from_json(j.at("weight"));
  const Json& bias = j.at("bias");
  emb.bias = Vector(static_cast<Index>(bias.size()));
  for (Index i = 0; i < emb.bias.size(); ++i) {
    emb.bias(i) = bias[static_cast<size_t>(i)].get<double>();
  }
  emb.validate();
  return emb;
}

Json checkpoint_to_json(const Checkpoint& checkpoint) {
  return Json{{"embedding", embedding_to_json(checkpoint.embedding)},
              {"episode", checkpoint.episode},
              {"rng_state", checkpoint.rng_state}};
}

Checkpoint checkpoint_from_json(const Json& j) {
  Checkpoint checkpoint;
  checkpoint.embedding = embedding_from_json(j.at("embedding"));
  checkpoint.episode = j.at("episode").get<int>();
  checkpoint.rng_state = j.at("rng_state").get<std::string>();
  return checkpoint;
}

}  // namespace otseq
