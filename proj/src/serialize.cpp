/**
 * @file serialize.cpp
 * @brief JSON conversions.
 */

#include "otseq/serialize.hpp"

#include <stdexcept>

namespace otseq {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw std::invalid_argument("matrix_from_json: expected a non-empty array of arrays");
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<size_t>(i)];
    if (static_cast<Index>(row.size()) != cols) {
      throw std::invalid_argument("matrix_from_json: ragged rows");
    }
    for (Index c = 0; c < cols; ++c) {
      m(i, c) = row[static_cast<size_t>(c)].get<double>();
    }
  }
  return m;
}

Json sequence_to_json(const SegmentSequence& s) {
  return Json{{"segments", matrix_to_json(s.data())}};
}

SegmentSequence sequence_from_json(const Json& j) {
  if (!j.contains("segments")) {
    throw std::invalid_argument("sequence_from_json: missing \"segments\"");
  }
  return SegmentSequence(matrix_from_json(j.at("segments")));
}

Json bank_to_json(const ClassBank& bank) {
  Json classes = Json::array();
  for (const Matrix& tuple : bank.classes) {
    classes.push_back(matrix_to_json(tuple));
  }
  return Json{{"rng_seed", bank.rng_seed}, {"classes", std::move(classes)}};
}

ClassBank bank_from_json(const Json& j) {
  ClassBank bank;
  bank.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  for (const Json& tuple : j.at("classes")) {
    bank.classes.push_back(matrix_from_json(tuple));
  }
  return bank;
}

namespace {

Json labeled_list_to_json(const std::vector<LabeledSequence>& items) {
  Json out = Json::array();
  for (const auto& item : items) {
    out.push_back(Json{{"label", item.label}, {"segments", matrix_to_json(item.sequence.data())}});
  }
  return out;
}

std::vector<LabeledSequence> labeled_list_from_json(const Json& j) {
  std::vector<LabeledSequence> items;
  for (const Json& entry : j) {
    items.push_back({SegmentSequence(matrix_from_json(entry.at("segments"))),
                     entry.at("label").get<int>()});
  }
  return items;
}

}  // namespace

Json episode_to_json(const Episode& episode) {
  return Json{{"n_way", episode.n_way},
              {"k_shot", episode.k_shot},
              {"q_per_class", episode.q_per_class},
              {"support", labeled_list_to_json(episode.support)},
              {"query", labeled_list_to_json(episode.query)}};
}

Episode episode_from_json(const Json& j) {
  Episode episode;
  episode.n_way = j.at("n_way").get<int>();
  episode.k_shot = j.at("k_shot").get<int>();
  episode.q_per_class = j.at("q_per_class").get<int>();
  episode.support = labeled_list_from_json(j.at("support"));
  episode.query = labeled_list_from_json(j.at("query"));
  episode.validate();
  return episode;
}

}  // namespace otseq
