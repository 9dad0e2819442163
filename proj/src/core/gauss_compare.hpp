#pragma once

#include <span>
#include <vector>

#include "solver.hpp"
#include "types.hpp"

namespace rdb {

/// Worst-case binary MSE of the minimax weights vs. the Gaussian-QP weights
/// on the same design, with the analytic ratio bounds.
struct ratio_report {
  std::size_t n = 0;
  double c = 0.0;
  double value_binary = 0.0;             // worst-case MSE of the minimax weights
  double value_gauss_under_binary = 0.0; // worst-case binary MSE of the QP weights
  double ratio_mse = 0.0;
  double ratio_root_mse = 0.0;
  double u_hat = 0.0;                    // shrinkage mass of the minimax weights
  double lemma_upper = 0.0;              // u^-2 (1 + C^2 sum w^2 r^2 / (sum w^2 / 4))
  double lemma_cap = 0.0;                // 2 u^-2
  bool degenerate = false;               // u_hat == 0: bounds inapplicable
};

ratio_report compare_worst_case(std::span<const double> radii, lipschitz_bound c,
                                const solver_options& opts = {});

/// Ratio curve over sample sizes for an equally spaced design on (0,1]
/// (radii i/n). Rows are plot-ready for CSV export.
std::vector<ratio_report> ratio_curve(std::span<const int> sizes, lipschitz_bound c,
                                      const solver_options& opts = {});

}  // namespace rdb
