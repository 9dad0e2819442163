#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace rdb {

struct solver_options {
  double tol = 1e-8;
  int max_iter = 5000;
  int restarts = 3;
  int anchor_grid = 1001;
  std::uint64_t seed = 20240501;
};

struct solve_result {
  weight_profile weights;
  double value = 0.0;  // certified worst-case MSE at the solution
  int iterations = 0;
  std::vector<std::string> active_constraints;
};

/// Minimize the worst-case binary MSE over nonincreasing nonnegative weights
/// with sum(w) <= 1 and w_i fixed to zero wherever C r_i >= 1/2. Projected
/// subgradient descent (subgradient taken at the maximizing anchor of the
/// closed-form evaluation), projection by pool-adjacent-violators followed by
/// a shift-and-clip sum cap, jittered restarts, then a coordinate-wise
/// golden-section polish. The returned value is re-certified by an
/// independent closed-form evaluation of the final weights.
solve_result solve_minimax_weights(std::span<const double> radii, lipschitz_bound c,
                                   const solver_options& opts = {});

/// Quadratic program min C^2 (sum w_i r_i)^2 + sum w_i^2 sigma_i^2 over the
/// simplex {sum w = 1, w >= 0}. sigma2 empty means 1/4 everywhere. Projected
/// gradient with exact line search on the quadratic; simplex projection by
/// the sorting method.
solve_result solve_gaussian_weights(std::span<const double> radii, lipschitz_bound c,
                                    std::span<const double> sigma2 = {},
                                    const solver_options& opts = {});

/// Jointly minimize the two-sided worst-case MSE over both sides' constrained
/// weight sets. Certified against worst_case::ate_worst_case_mse.
std::pair<solve_result, solve_result> solve_ate_weights(const design& d,
                                                        lipschitz_bound c,
                                                        const solver_options& opts = {});

}  // namespace rdb
