/**
 * @file synthgen.cpp
 * @brief Synthetic benchmark generation.
 */

#include "otseq/synthgen.hpp"

#include <stdexcept>

namespace otseq {

namespace {

Matrix sample_unit_prototypes(int m, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix tuple(m, dim);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < dim; ++j) {
      tuple(i, j) = gauss(rng);
    }
  }
  for (Index i = 0; i < m; ++i) {
    const double norm = tuple.row(i).norm();
    if (norm == 0.0) {
      // Astronomically unlikely; caller resamples.
      return Matrix();
    }
    tuple.row(i) /= norm;
  }
  return tuple;
}

bool tuple_is_palindromic(const Matrix& tuple) {
  // Single-segment tuples are trivially their own reversal; rejecting them
  // would loop forever, and reversal is a no-op there anyway.
  if (tuple.rows() < 2) {
    return false;
  }
  const Matrix reversed = tuple.colwise().reverse();
  return (tuple.array() == reversed.array()).all();
}

bool tuple_repeats_a_prototype(const Matrix& tuple) {
  for (Index i = 0; i < tuple.rows(); ++i) {
    for (Index j = i + 1; j < tuple.rows(); ++j) {
      if ((tuple.row(i).array() == tuple.row(j).array()).all()) {
        return true;
      }
    }
  }
  return false;
}

void check_generator_config(const GeneratorConfig& cfg) {
  if (cfg.n_classes < 2) {
    throw std::invalid_argument("GeneratorConfig: n_classes must be at least 2");
  }
  if (cfg.m_segments < 1 || cfg.dim < 1) {
    throw std::invalid_argument("GeneratorConfig: m_segments and dim must be positive");
  }
  if (cfg.noise_sigma < 0.0) {
    throw std::invalid_argument("GeneratorConfig: noise_sigma must be non-negative");
  }
}

}  // namespace

ClassBank generate_class_bank(const GeneratorConfig& cfg) {
  check_generator_config(cfg);
  std::mt19937_64 rng(cfg.rng_seed);
  ClassBank bank;
  bank.rng_seed = cfg.rng_seed;
  bank.classes.reserve(static_cast<size_t>(cfg.n_classes));
  while (bank.n_classes() < cfg.n_classes) {
    Matrix tuple = sample_unit_prototypes(cfg.m_segments, cfg.dim, rng);
    if (tuple.size() == 0 || tuple_is_palindromic(tuple) || tuple_repeats_a_prototype(tuple)) {
      continue;
    }
    bool collides = false;
    for (const Matrix& existing : bank.classes) {
      if ((existing.array() == tuple.array()).all()) {
        collides = true;
        break;
      }
    }
    if (!collides) {
      bank.classes.push_back(std::move(tuple));
    }
  }
  return bank;
}

SegmentSequence sample_sequence(const ClassBank& bank, int class_index, double noise_sigma,
                                std::mt19937_64& rng) {
  if (class_index < 0 || class_index >= bank.n_classes()) {
    throw std::invalid_argument("sample_sequence: class index out of range");
  }
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("sample_sequence: noise_sigma must be non-negative");
  }
  Matrix data = bank.classes[static_cast<size_t>(class_index)];
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) {
      data(i, j) += noise_sigma * gauss(rng);
    }
  }
  return SegmentSequence(std::move(data));
}

SegmentSequence reverse_sequence(const SegmentSequence& a) {
  return SegmentSequence(a.data().colwise().reverse());
}

int label_count(const ClassBank& bank, Regime regime) {
  return regime == Regime::kOrderingDominated ? 2 * bank.n_classes() : bank.n_classes();
}

Episode build_episode(const ClassBank& bank, const GeneratorConfig& cfg, int n_way, int k_shot,
                      int q, std::mt19937_64& rng) {
  const int labels_available = label_count(bank, cfg.regime);
  if (n_way > labels_available) {
    throw std::invalid_argument("build_episode: n_way exceeds the regime's label space");
  }

  // Partial Fisher-Yates draw of n_way distinct labels.
  std::vector<int> labels(static_cast<size_t>(labels_available));
  for (int l = 0; l < labels_available; ++l) {
    labels[static_cast<size_t>(l)] = l;
  }
  for (int i = 0; i < n_way; ++i) {
    std::uniform_int_distribution<int> pick(i, labels_available - 1);
    std::swap(labels[static_cast<size_t>(i)], labels[static_cast<size_t>(pick(rng))]);
  }
  labels.resize(static_cast<size_t>(n_way));

  auto draw_instance = [&](int label) {
    if (cfg.regime == Regime::kOrderingDominated) {
      const int base = label % bank.n_classes();
      SegmentSequence s = sample_sequence(bank, base, cfg.noise_sigma, rng);
      return label >= bank.n_classes() ? reverse_sequence(s) : s;
    }
    SegmentSequence s = sample_sequence(bank, label, cfg.noise_sigma, rng);
    std::uniform_int_distribution<int> coin(0, 1);
    return coin(rng) == 1 ? reverse_sequence(s) : s;
  };

  Episode episode;
  episode.n_way = n_way;
  episode.k_shot = k_shot;
  episode.q_per_class = q;
  for (const int label : labels) {
    for (int k = 0; k < k_shot; ++k) {
      episode.support.push_back({draw_instance(label), label});
    }
  }
  for (const int label : labels) {
    for (int j = 0; j < q; ++j) {
      episode.query.push_back({draw_instance(label), label});
    }
  }
  episode.validate();
  return episode;
}

}  // namespace otseq
