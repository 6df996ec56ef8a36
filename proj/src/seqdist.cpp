/**
 * @file seqdist.cpp
 * @brief Sequence distance implementations.
 */

#include "otseq/seqdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otseq {

namespace {

Marginal resolve_marginal(const Marginal& configured, Index length, const char* which) {
  if (configured.empty()) {
    return Marginal::uniform(length);
  }
  if (configured.size() != length) {
    throw std::invalid_argument(std::string("cmot_distance: ") + which +
                                " marginal length does not match the sequence");
  }
  return configured;
}

Vector sorted_mean(const Matrix& segments) {
  const Index m = segments.rows();
  Vector mean(segments.cols());
  std::vector<double> column(static_cast<size_t>(m));
  for (Index j = 0; j < segments.cols(); ++j) {
    for (Index i = 0; i < m; ++i) {
      column[static_cast<size_t>(i)] = segments(i, j);
    }
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (const double x : column) {
      sum += x;
    }
    mean(j) = sum / static_cast<double>(m);
  }
  return mean;
}

}  // namespace

double cost_median(const Matrix& cost) {
  if (cost.size() == 0) {
    throw std::invalid_argument("cost_median: empty matrix");
  }
  std::vector<double> entries(cost.data(), cost.data() + cost.size());
  std::sort(entries.begin(), entries.end());
  const size_t n = entries.size();
  if (n % 2 == 1) {
    return entries[n / 2];
  }
  return 0.5 * (entries[n / 2 - 1] + entries[n / 2]);
}

SequenceDistanceResult cmot_distance(const SegmentSequence& a, const SegmentSequence& b,
                                     const DistanceConfig& cfg) {
  const Matrix semantic = semantic_cost(a, b);

  Matrix cost;
  if (cfg.fusion.alpha == 0.0) {
    // Positional table is skipped entirely so the reduction to the
    // semantic-only transport is bitwise, not just approximate.
    cost = semantic;
  } else {
    PositionalConfig positional = cfg.positional;
    if (positional.variant != PositionalVariant::kNormalizedOffset &&
        positional.pe_dimension < 1) {
      positional.pe_dimension = static_cast<int>(a.dim());
    }
    cost = fused_cost(semantic, positional_cost(a.length(), b.length(), positional), cfg.fusion);
  }

  SinkhornConfig solver = cfg.sinkhorn;
  if (cfg.lambda_auto) {
    const double median = cost_median(cost);
    solver.lambda = median < 1e-12 ? cfg.lambda_multiplier : cfg.lambda_multiplier / median;
  }

  const Marginal mu = resolve_marginal(cfg.marginal_a, a.length(), "first");
  const Marginal nu = resolve_marginal(cfg.marginal_b, b.length(), "second");
  const SinkhornResult solved = sinkhorn_solve(cost, mu, nu, solver);

  SequenceDistanceResult result;
  result.value = solved.value;
  result.plan = solved.plan;
  result.lambda = solver.lambda;
  result.linear_cost = solved.linear_cost;
  result.iterations_used = solved.iterations_used;
  result.converged = solved.converged;
  return result;
}

double agg_distance(const SegmentSequence& a, const SegmentSequence& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("agg_distance: embedding dimensions differ");
  }
  return (sorted_mean(a.data()) - sorted_mean(b.data())).norm();
}

std::pair<double, std::vector<std::pair<Index, Index>>> dtw_distance(const SegmentSequence& a,
                                                                     const SegmentSequence& b) {
  const Matrix cost = semantic_cost(a, b);
  const Index m1 = cost.rows();
  const Index m2 = cost.cols();

  // choice: 0 = path start, 1 = diagonal, 2 = row advance, 3 = column advance
  Matrix total(m1, m2);
  Eigen::MatrixXi choice(m1, m2);
  total(0, 0) = cost(0, 0);
  choice(0, 0) = 0;
  for (Index i = 1; i < m1; ++i) {
    total(i, 0) = total(i - 1, 0) + cost(i, 0);
    choice(i, 0) = 2;
  }
  for (Index j = 1; j < m2; ++j) {
    total(0, j) = total(0, j - 1) + cost(0, j);
    choice(0, j) = 3;
  }
  for (Index i = 1; i < m1; ++i) {
    for (Index j = 1; j < m2; ++j) {
      double best = total(i - 1, j - 1);
      int move = 1;
      if (total(i - 1, j) < best) {
        best = total(i - 1, j);
        move = 2;
      }
      if (total(i, j - 1) < best) {
        best = total(i, j - 1);
        move = 3;
      }
      total(i, j) = cost(i, j) + best;
      choice(i, j) = move;
    }
  }

  std::vector<std::pair<Index, Index>> path;
  Index i = m1 - 1;
  Index j = m2 - 1;
  while (true) {
    path.emplace_back(i, j);
    const int move = choice(i, j);
    if (move == 0) {
      break;
    }
    if (move == 1) {
      --i;
      --j;
    } else if (move == 2) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(path.begin(), path.end());
  return {total(m1 - 1, m2 - 1), std::move(path)};
}

double dtw_exhaustive(const SegmentSequence& a, const SegmentSequence& b) {
  if (a.length() > 6 || b.length() > 6) {
    throw std::invalid_argument("dtw_exhaustive: sequences longer than 6 are rejected");
  }
  const Matrix cost = semantic_cost(a, b);
  const Index m1 = cost.rows();
  const Index m2 = cost.cols();

  double best = std::numeric_limits<double>::infinity();
  // Depth-first walk over every monotone path from (0,0) to (m1-1, m2-1).
  auto walk = [&](auto&& self, Index i, Index j, double acc) -> void {
    acc += cost(i, j);
    if (i == m1 - 1 && j == m2 - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < m1 && j + 1 < m2) {
      self(self, i + 1, j + 1, acc);
    }
    if (i + 1 < m1) {
      self(self, i + 1, j, acc);
    }
    if (j + 1 < m2) {
      self(self, i, j + 1, acc);
    }
  };
  walk(walk, 0, 0, 0.0);
  return best;
}

}  // namespace otseq
