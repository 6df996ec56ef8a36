/**
 * @file costs.cpp
 * @brief Cost matrix construction.
 */

#include "otseq/costs.hpp"

#include <cmath>
#include <stdexcept>

namespace otseq {

namespace {

void check_positional_inputs(Index m1, Index m2, const PositionalConfig& cfg) {
  if (m1 < 1 || m2 < 1) {
    throw std::invalid_argument("positional_cost: sequence lengths must be at least 1");
  }
  if (!(cfg.sigma > 0.0)) {
    throw std::invalid_argument("positional_cost: sigma must be positive");
  }
  if (cfg.variant != PositionalVariant::kNormalizedOffset && cfg.pe_dimension < 1) {
    throw std::invalid_argument("positional_cost: encoding variants need pe_dimension >= 1");
  }
}

Matrix offset_kernel(Index m1, Index m2, double sigma) {
  const double inv_sigma_sq = 1.0 / (sigma * sigma);
  Matrix c(m1, m2);
  for (Index p = 0; p < m1; ++p) {
    for (Index q = 0; q < m2; ++q) {
      const double delta = static_cast<double>(p + 1) / static_cast<double>(m1) -
                           static_cast<double>(q + 1) / static_cast<double>(m2);
      c(p, q) = std::exp(-inv_sigma_sq / (delta * delta + 1.0));
    }
  }
  return c;
}

// Index m (1-based) encoded as a constant ramp: every coordinate is m/M.
Matrix uniform_encodings(Index m, int dim) {
  Matrix enc(m, dim);
  for (Index i = 0; i < m; ++i) {
    enc.row(i).setConstant(static_cast<double>(i + 1) / static_cast<double>(m));
  }
  return enc;
}

// Index m (1-based) encoded with the 10000-base sinusoid table: coordinate d
// (1-based) is sin(m / 10000^(d/D)) for even d and cos(m / 10000^((d-1)/D))
// for odd d.
Matrix sinusoid_encodings(Index m, int dim) {
  Matrix enc(m, dim);
  for (Index i = 0; i < m; ++i) {
    const double pos = static_cast<double>(i + 1);
    for (int d = 1; d <= dim; ++d) {
      const double exponent =
          (d % 2 == 0) ? static_cast<double>(d) / dim : static_cast<double>(d - 1) / dim;
      const double angle = pos / std::pow(10000.0, exponent);
      enc(i, d - 1) = (d % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return enc;
}

Matrix encoding_distances(const Matrix& enc_a, const Matrix& enc_b) {
  Matrix c(enc_a.rows(), enc_b.rows());
  for (Index p = 0; p < enc_a.rows(); ++p) {
    for (Index q = 0; q < enc_b.rows(); ++q) {
      c(p, q) = (enc_a.row(p) - enc_b.row(q)).norm();
    }
  }
  return c;
}

}  // namespace

Matrix semantic_cost(const SegmentSequence& a, const SegmentSequence& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("semantic_cost: embedding dimensions differ");
  }
  Matrix c(a.length(), b.length());
  for (Index p = 0; p < a.length(); ++p) {
    for (Index q = 0; q < b.length(); ++q) {
      c(p, q) = (a.segment(p) - b.segment(q)).norm();
    }
  }
  return c;
}

Matrix positional_cost(Index m1, Index m2, const PositionalConfig& cfg) {
  check_positional_inputs(m1, m2, cfg);
  switch (cfg.variant) {
    case PositionalVariant::kNormalizedOffset:
      return offset_kernel(m1, m2, cfg.sigma);
    case PositionalVariant::kUniformPe:
      return encoding_distances(uniform_encodings(m1, cfg.pe_dimension),
                                uniform_encodings(m2, cfg.pe_dimension));
    case PositionalVariant::kSinusoidPe:
      return encoding_distances(sinusoid_encodings(m1, cfg.pe_dimension),
                                sinusoid_encodings(m2, cfg.pe_dimension));
  }
  throw std::logic_error("positional_cost: unknown variant");
}

Matrix fused_cost(const Matrix& semantic, const Matrix& positional, const FusionConfig& cfg) {
  if (semantic.rows() != positional.rows() || semantic.cols() != positional.cols()) {
    throw std::invalid_argument("fused_cost: shape mismatch");
  }
  if (cfg.alpha < 0.0) {
    throw std::invalid_argument("fused_cost: alpha must be non-negative");
  }
  return semantic + cfg.alpha * positional;
}

}  // namespace otseq
