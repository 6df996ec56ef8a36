/**
 * @file sinkhorn.cpp
 * @brief Entropy-regularized optimal transport solver.
 */

#include "otseq/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace otseq {

namespace {

// Smallest double the scaling kernel may hold before we switch to log-domain
// updates; exp(-lambda * max cost) below this would flush rows of the kernel
// to zero and poison the divisions.
constexpr double kKernelUnderflow = 1e-300;

void check_solve_inputs(const Matrix& cost, const Marginal& mu, const Marginal& nu,
                        const SinkhornConfig& cfg) {
  if (cost.rows() < 1 || cost.cols() < 1) {
    throw std::invalid_argument("sinkhorn_solve: empty cost matrix");
  }
  if (!cost.allFinite() || (cost.array() < 0.0).any()) {
    throw std::invalid_argument("sinkhorn_solve: cost entries must be finite and non-negative");
  }
  mu.validate();
  nu.validate();
  if (mu.size() != cost.rows() || nu.size() != cost.cols()) {
    throw std::invalid_argument("sinkhorn_solve: marginal sizes must match the cost matrix");
  }
  if ((mu.weights.array() <= 0.0).any() || (nu.weights.array() <= 0.0).any()) {
    throw std::invalid_argument("sinkhorn_solve: marginal entries must be strictly positive");
  }
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
    throw std::invalid_argument("sinkhorn_solve: lambda must be positive and finite");
  }
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("sinkhorn_solve: max_iterations must be at least 1");
  }
  if (!(cfg.residual_tolerance > 0.0)) {
    throw std::invalid_argument("sinkhorn_solve: residual_tolerance must be positive");
  }
}

double marginal_residual(const Matrix& plan, const Vector& mu, const Vector& nu) {
  const double row_gap = (plan.rowwise().sum() - mu).cwiseAbs().sum();
  const double col_gap = (plan.colwise().sum().transpose() - nu).cwiseAbs().sum();
  return std::max(row_gap, col_gap);
}

void finalize_value(const Matrix& cost, double lambda, SinkhornResult& result) {
  result.linear_cost = (result.plan.array() * cost.array()).sum();
  result.value = result.linear_cost - entropy(result.plan) / lambda;
}

SinkhornResult solve_plain(const Matrix& cost, const Vector& mu, const Vector& nu,
                           const SinkhornConfig& cfg) {
  const Matrix kernel = (-cfg.lambda * cost.array()).exp();
  Vector u = Vector::Ones(cost.rows());
  Vector v = Vector::Ones(cost.cols());

  SinkhornResult result;
  result.final_residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    u = mu.array() / (kernel * v).array();
    v = nu.array() / (kernel.transpose() * u).array();
    if (!u.allFinite() || !v.allFinite()) {
      throw std::runtime_error(
          "sinkhorn_solve: scaling vectors left double range; retry with log_domain");
    }
    result.plan = u.asDiagonal() * kernel * v.asDiagonal();
    result.final_residual = marginal_residual(result.plan, mu, nu);
    result.iterations_used = it;
    if (result.final_residual <= cfg.residual_tolerance) {
      result.converged = true;
      break;
    }
  }
  result.scaling_u = u;
  result.scaling_v = v;
  finalize_value(cost, cfg.lambda, result);
  return result;
}

double log_sum_exp(const Vector& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) {
    return m;
  }
  return m + std::log((x.array() - m).exp().sum());
}

SinkhornResult solve_log_domain(const Matrix& cost, const Vector& mu, const Vector& nu,
                                const SinkhornConfig& cfg) {
  const Matrix log_kernel = -cfg.lambda * cost;
  const Vector log_mu = mu.array().log();
  const Vector log_nu = nu.array().log();
  Vector log_u = Vector::Zero(cost.rows());
  Vector log_v = Vector::Zero(cost.cols());

  SinkhornResult result;
  result.final_residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    for (Index i = 0; i < cost.rows(); ++i) {
      log_u(i) = log_mu(i) - log_sum_exp(log_kernel.row(i).transpose() + log_v);
    }
    for (Index j = 0; j < cost.cols(); ++j) {
      log_v(j) = log_nu(j) - log_sum_exp(log_kernel.col(j) + log_u);
    }
    result.plan =
        ((log_u.replicate(1, cost.cols()) + log_kernel + log_v.transpose().replicate(cost.rows(), 1))
             .array())
            .exp();
    result.final_residual = marginal_residual(result.plan, mu, nu);
    result.iterations_used = it;
    if (result.final_residual <= cfg.residual_tolerance) {
      result.converged = true;
      break;
    }
  }
  result.scaling_u = log_u.array().exp();
  result.scaling_v = log_v.array().exp();
  finalize_value(cost, cfg.lambda, result);
  return result;
}

}  // namespace

// ============================================================================
// Public API
// ============================================================================

SinkhornResult sinkhorn_solve(const Matrix& cost, const Marginal& mu, const Marginal& nu,
                              const SinkhornConfig& cfg) {
  check_solve_inputs(cost, mu, nu, cfg);
  const bool kernel_underflows =
      std::exp(-cfg.lambda * cost.maxCoeff()) < kKernelUnderflow;
  if (cfg.log_domain || kernel_underflows) {
    return solve_log_domain(cost, mu.weights, nu.weights, cfg);
  }
  return solve_plain(cost, mu.weights, nu.weights, cfg);
}

double sinkhorn_distance(const Matrix& cost, const Marginal& mu, const Marginal& nu,
                         const SinkhornConfig& cfg) {
  return sinkhorn_solve(cost, mu, nu, cfg).value;
}

std::pair<double, std::vector<int>> exact_ot_uniform(const Matrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw std::invalid_argument("exact_ot_uniform: cost matrix must be square");
  }
  const Index m = cost.rows();
  if (m < 1 || m > 8) {
    throw std::invalid_argument("exact_ot_uniform: supported sizes are 1 <= M <= 8");
  }
  if (!cost.allFinite()) {
    throw std::invalid_argument("exact_ot_uniform: cost entries must be finite");
  }

  std::vector<int> perm(static_cast<size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (Index i = 0; i < m; ++i) {
      sum += cost(i, perm[static_cast<size_t>(i)]);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  return {best_sum / static_cast<double>(m), best};
}

double entropy(const Matrix& plan) {
  if ((plan.array() < 0.0).any() || !plan.allFinite()) {
    throw std::invalid_argument("entropy: plan entries must be finite and non-negative");
  }
  double h = 0.0;
  for (Index i = 0; i < plan.rows(); ++i) {
    for (Index j = 0; j < plan.cols(); ++j) {
      const double t = plan(i, j);
      if (t > 0.0) {
        h -= t * std::log(t);
      }
    }
  }
  return h;
}

Matrix value_gradient_wrt_cost(const SinkhornResult& result) {
  if (result.plan.size() == 0) {
    throw std::invalid_argument("value_gradient_wrt_cost: result holds no plan");
  }
  return result.plan;
}

}  // namespace otseq
