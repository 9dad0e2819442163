#pragma once

#include <span>

#include "types.hpp"

namespace rdb {

struct worst_case_report {
  enum class method_t { closed_form, grid, brute };

  double value = 0.0;
  double anchor = 0.0;        // maximizing theta_0 (treated-side anchor for ATE)
  double anchor_minus = 0.0;  // control-side anchor, ATE case only
  method_t method = method_t::closed_form;
};

/// Envelope profile (t, min{t + C r_1, 1/2}, ..., min{t + C r_n, 1/2}).
mean_profile envelope_theta(double t, lipschitz_bound c, std::span<const double> radii);

/// (sum w_i theta_i - theta_0)^2 + sum w_i^2 (1/4 - theta_i^2).
double mse_binary(const weight_profile& w, const mean_profile& theta);

/// (sum w_i theta_i - theta_0)^2 + sum w_i^2 sigma_i^2.
double mse_gauss(const weight_profile& w, const mean_profile& theta,
                 std::span<const double> sigma2);

/// Exact maximum over theta_0 in [-1/2,0] of mse_binary at the envelope.
/// The anchor range is split at the clipping kinks t = 1/2 - C r_i and each
/// piece's quadratic is maximized analytically; with no clipped observation
/// this is the single interior-condition / beta(w) case.
worst_case_report gbar_closed(const weight_profile& w, lipschitz_bound c,
                              std::span<const double> radii);

/// Same maximum approximated on m equally spaced anchors.
worst_case_report gbar_grid(const weight_profile& w, lipschitz_bound c,
                            std::span<const double> radii, int m);

/// Exhaustive maximization over the full (n+1)-dimensional feasible set on a
/// uniform grid of [-1/2,1/2] with pairwise filter |theta_i - theta_j| <=
/// C |r_i - r_j| (r_0 = 0). Test oracle; requires n <= 4.
worst_case_report worst_case_mse_brute(const weight_profile& w, lipschitz_bound c,
                                       std::span<const double> radii, double step);

/// Worst-case MSE of the two-sided estimator over the anchor rectangle
/// [-1/2,0] x [0,1/2], evaluated on an m x m grid with one golden-section
/// refinement pass per coordinate around the grid argmax.
worst_case_report ate_worst_case_mse(const weight_profile& w_plus,
                                     const weight_profile& w_minus,
                                     lipschitz_bound c, const design& d,
                                     int grid_m = 101);

/// The ATE objective at fixed anchors (no maximization); shared by the report
/// above and the joint solver.
double ate_mse_at(const weight_profile& w_plus, const weight_profile& w_minus,
                  lipschitz_bound c, std::span<const double> radii_plus,
                  std::span<const double> radii_minus, double t_plus, double t_minus);

}  // namespace rdb
