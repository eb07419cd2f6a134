#pragma once

// Sequential minimal optimization for the soft-margin dual
//
//   min_a  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j K_ij
//
// with second-order working-set selection (Fan, Chen & Lin, JMLR 2005).

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "svmcs/criterion.hpp"
#include "svmcs/error.hpp"
#include "svmcs/kernel.hpp"
#include "svmcs/kernel_cache.hpp"

namespace svmcs {

struct SmoOptions {
  double tolerance = 1e-6;                  // stop when max KKT violation < tolerance
  std::size_t max_iterations = 10'000'000;  // pair updates
  std::size_t cache_bytes = 256u << 20;
};

struct DualSolution {
  std::vector<double> alphas;
  double bias = 0.0;
  std::vector<std::size_t> support_indices;  // alpha > 0
  std::size_t iterations = 0;
  double max_violation = 0.0;
};

template <Kernel K>
DualSolution solve_dual(const LabeledGrid& data, const K& kernel, double c,
                        const SmoOptions& opt = {}) {
  require(c > 0.0 && std::isfinite(c), errc::invalid_argument, "C must be positive");
  if (!data.both_classes())
    fail(errc::degenerate_training, "training data must contain both labels");

  const std::size_t n = data.size();
  constexpr double tau = 1e-12;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = to_double(data.labels()[i]);

  KernelRowCache<K> cache(data.points(), kernel, opt.cache_bytes);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  auto is_upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  // I_up: a_t can move so that y_t a_t increases.
  auto in_up = [&](std::size_t t) { return y[t] > 0 ? !is_upper(t) : !is_lower(t); };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? !is_lower(t) : !is_upper(t); };

  DualSolution sol;
  std::size_t iter = 0;
  double violation = 0.0;
  while (true) {
    // First index: maximal violating candidate in I_up.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] >= gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    // Second index: largest second-order decrease among I_low.
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    const std::vector<double>* row_i = nullptr;
    if (i < n) row_i = &cache.row(i);
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double ygt = y[t] * grad[t];
      gmax2 = std::max(gmax2, ygt);
      const double b = gmax + ygt;
      if (b > 0.0 && row_i) {
        double a = cache.diag(i) + cache.diag(t) - 2.0 * (*row_i)[t];
        if (a <= 0.0) a = tau;
        const double obj = -(b * b) / a;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    violation = gmax + gmax2;
    if (violation < opt.tolerance || j == n || i == n) break;
    if (iter >= opt.max_iterations)
      fail(errc::solver_failure, "SMO reached the iteration cap with KKT violation " +
                                     std::to_string(violation));
    ++iter;

    const std::vector<double>& ki = cache.row(i);
    const std::vector<double>& kj = cache.row(j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double quad = cache.diag(i) + cache.diag(j) - 2.0 * ki[j];
    if (quad <= 0.0) quad = tau;

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else {
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = -diff;
        }
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = c + diff;
        }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = sum;
        }
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else {
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = sum;
        }
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    // Q_ti = y_t y_i K_ti
    const double si = y[i] * dai;
    const double sj = y[j] * daj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (si * ki[t] + sj * kj[t]);
  }

  // Offset: average y_t G_t over free vectors, else the midpoint of the
  // feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (is_upper(t)) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  sol.alphas = std::move(alpha);
  sol.bias = -rho;
  for (std::size_t t = 0; t < n; ++t)
    if (sol.alphas[t] > 0.0) sol.support_indices.push_back(t);
  sol.iterations = iter;
  sol.max_violation = violation;
  return sol;
}

}  // namespace svmcs
