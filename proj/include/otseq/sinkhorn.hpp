/**
 * @file sinkhorn.hpp
 * @brief Entropy-regularized optimal transport on dense cost matrices.
 */

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "otseq/types.hpp"

namespace otseq {

// ============================================================================
// Configuration and result types
// ============================================================================

struct SinkhornConfig {
  double lambda = 1.0;               // entropic regularization strength, > 0
  int max_iterations = 10000;        // full u/v sweeps before giving up
  double residual_tolerance = 1e-9;  // max L1 marginal violation at exit
  bool log_domain = false;           // force log-sum-exp updates
};

struct SinkhornResult {
  Matrix plan;            // transport plan, rows x cols of the cost matrix
  double value = 0.0;     // <plan, cost> - entropy(plan) / lambda
  double linear_cost = 0.0;
  int iterations_used = 0;
  double final_residual = 0.0;
  bool converged = false;
  Vector scaling_u;
  Vector scaling_v;
};

// ============================================================================
// Operations
// ============================================================================

/**
 * Runs Sinkhorn scaling on exp(-lambda * cost) until the transport plan
 * reproduces both marginals within the configured L1 tolerance.
 *
 * Falls back to log-domain updates automatically when the kernel would
 * underflow double precision. Non-convergence is reported through the
 * `converged` flag rather than an exception.
 */
SinkhornResult sinkhorn_solve(const Matrix& cost, const Marginal& mu, const Marginal& nu,
                              const SinkhornConfig& cfg);

/// Entropic transport value only; see sinkhorn_solve.
double sinkhorn_distance(const Matrix& cost, const Marginal& mu, const Marginal& nu,
                         const SinkhornConfig& cfg);

/**
 * Exact unregularized transport value for a square cost matrix under uniform
 * marginals, found by enumerating assignments. Supports M <= 8. Returns the
 * value and the first optimal assignment in lexicographic order.
 */
std::pair<double, std::vector<int>> exact_ot_uniform(const Matrix& cost);

/// Shannon entropy -sum T log T with the 0 log 0 = 0 convention.
double entropy(const Matrix& plan);

/**
 * Gradient of the entropic transport value with respect to each cost entry.
 * At the optimum this is the transport plan itself, so the solve already
 * carries the full derivative.
 */
Matrix value_gradient_wrt_cost(const SinkhornResult& result);

}  // namespace otseq
