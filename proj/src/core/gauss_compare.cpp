#include "gauss_compare.hpp"

#include <cmath>

#include "worst_case.hpp"

namespace rdb {

ratio_report compare_worst_case(std::span<const double> radii, lipschitz_bound c,
                                const solver_options& opts) {
  if (radii.empty()) throw error(errc::empty_side, "comparison needs n >= 1");
  ratio_report rep;
  rep.n = radii.size();
  rep.c = c.c;

  const solve_result binary = solve_minimax_weights(radii, c, opts);
  const solve_result gauss = solve_gaussian_weights(radii, c, {}, opts);
  rep.value_binary = binary.value;
  rep.value_gauss_under_binary = gbar_closed(gauss.weights, c, radii).value;
  rep.ratio_mse = rep.value_gauss_under_binary / rep.value_binary;
  rep.ratio_root_mse = std::sqrt(rep.ratio_mse);
  rep.u_hat = binary.weights.shrinkage_mass();

  if (rep.u_hat > 0.0) {
    double s2 = 0.0, swr2 = 0.0;
    const auto& w = binary.weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      s2 += w[i] * w[i];
      swr2 += w[i] * w[i] * radii[i] * radii[i];
    }
    const double inv_u2 = 1.0 / (rep.u_hat * rep.u_hat);
    rep.lemma_upper = inv_u2 * (1.0 + c.c * c.c * swr2 / (0.25 * s2));
    rep.lemma_cap = 2.0 * inv_u2;
  } else {
    rep.degenerate = true;
    rep.lemma_upper = std::numeric_limits<double>::quiet_NaN();
    rep.lemma_cap = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::vector<ratio_report> ratio_curve(std::span<const int> sizes, lipschitz_bound c,
                                      const solver_options& opts) {
  std::vector<ratio_report> rows;
  rows.reserve(sizes.size());
  for (int n : sizes) {
    if (n < 1) throw error(errc::invalid_argument, "sample size must be >= 1");
    std::vector<double> radii(n);
    for (int i = 0; i < n; ++i) radii[i] = static_cast<double>(i + 1) / n;
    rows.push_back(compare_worst_case(radii, c, opts));
  }
  return rows;
}

}  // namespace rdb
