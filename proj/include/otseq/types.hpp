/**
 * @file types.hpp
 * @brief Shared numeric types: segment sequences and marginal weight vectors.
 */

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace otseq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ============================================================================
// SegmentSequence
// ============================================================================

/**
 * An ordered list of fixed-dimension feature vectors, stored row-wise:
 * row m is the descriptor of segment m. Length M >= 1, all entries finite.
 */
class SegmentSequence {
 public:
  SegmentSequence() = default;

  explicit SegmentSequence(Matrix segments) : data_(std::move(segments)) {
    if (data_.rows() < 1 || data_.cols() < 1) {
      throw std::invalid_argument("SegmentSequence: need at least one segment and one dimension");
    }
    if (!data_.allFinite()) {
      throw std::invalid_argument("SegmentSequence: non-finite entry");
    }
  }

  static SegmentSequence from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
      throw std::invalid_argument("SegmentSequence: empty row list");
    }
    const Index dim = static_cast<Index>(rows.front().size());
    Matrix m(static_cast<Index>(rows.size()), dim);
    for (Index r = 0; r < m.rows(); ++r) {
      if (static_cast<Index>(rows[static_cast<size_t>(r)].size()) != dim) {
        throw std::invalid_argument("SegmentSequence: ragged row list");
      }
      for (Index c = 0; c < dim; ++c) {
        m(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
      }
    }
    return SegmentSequence(std::move(m));
  }

  Index length() const { return data_.rows(); }
  Index dim() const { return data_.cols(); }

  const Matrix& data() const { return data_; }

  auto segment(Index m) const { return data_.row(m); }

  bool operator==(const SegmentSequence& other) const {
    return data_.rows() == other.data_.rows() && data_.cols() == other.data_.cols() &&
           data_ == other.data_;
  }

 private:
  Matrix data_;
};

// ============================================================================
// Marginal
// ============================================================================

/**
 * A probability vector over the segments of one sequence. Entries are
 * non-negative and sum to 1 within 1e-12. An empty marginal acts as a
 * placeholder for "uniform over the sequence length at call time".
 */
struct Marginal {
  Vector weights;

  static Marginal uniform(Index m) {
    if (m < 1) {
      throw std::invalid_argument("Marginal::uniform: length must be positive");
    }
    Marginal out;
    out.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
    return out;
  }

  Index size() const { return weights.size(); }
  bool empty() const { return weights.size() == 0; }

  void validate() const {
    if (weights.size() == 0) {
      throw std::invalid_argument("Marginal: empty weight vector");
    }
    if (!weights.allFinite() || (weights.array() < 0.0).any()) {
      throw std::invalid_argument("Marginal: weights must be finite and non-negative");
    }
    if (std::abs(weights.sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("Marginal: weights must sum to 1");
    }
  }
};

}  // namespace otseq
