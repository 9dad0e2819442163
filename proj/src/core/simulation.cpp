#include "simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "inference.hpp"
#include "rng.hpp"
#include "solver.hpp"

namespace rdb {

namespace {

constexpr std::uint64_t kPointDomain = 2;
constexpr std::uint64_t kIntervalDomain = 5;

double polyval(const std::vector<double>& coef, double x) {
  double acc = 0.0;
  for (std::size_t i = coef.size(); i-- > 0;) acc = acc * x + coef[i];
  return acc;
}

double polyder(const std::vector<double>& coef, double x) {
  double acc = 0.0;
  for (std::size_t i = coef.size(); i-- > 1;) {
    acc = acc * x + coef[i] * static_cast<double>(i);
  }
  return acc;
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double mean_of(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct accum {
  std::vector<double> err;      // estimate - tau_true
  std::vector<double> lengths;
  long covered = 0;
  long ci_reps = 0;

  void finalize(estimator_stats& out) {
    out.present = true;
    const std::size_t r = err.size();
    std::vector<double> sq(r);
    for (std::size_t i = 0; i < r; ++i) sq[i] = err[i] * err[i];
    const double mse = mean_of(sq);
    out.root_mse = std::sqrt(mse);
    double var_sq = 0.0;
    for (double v : sq) var_sq += (v - mse) * (v - mse);
    var_sq /= r > 1 ? (r - 1) : 1;
    const double mse_se = std::sqrt(var_sq / r);
    out.root_mse_se = out.root_mse > 0.0 ? mse_se / (2.0 * out.root_mse) : 0.0;
    out.bias = mean_of(err);
    double var_e = 0.0;
    for (double v : err) var_e += (v - out.bias) * (v - out.bias);
    var_e /= r > 1 ? (r - 1) : 1;
    out.bias_se = std::sqrt(var_e / r);
    if (ci_reps > 0) {
      out.mean_ci_length = mean_of(lengths);
      double var_l = 0.0;
      for (double v : lengths) var_l += (v - out.mean_ci_length) * (v - out.mean_ci_length);
      var_l /= ci_reps > 1 ? (ci_reps - 1) : 1;
      out.ci_length_se = std::sqrt(var_l / ci_reps);
      out.coverage = static_cast<double>(covered) / ci_reps;
      out.coverage_se = std::sqrt(out.coverage * (1.0 - out.coverage) / ci_reps);
    }
  }
};

}  // namespace

dgp_spec default_lee_spec() {
  dgp_spec spec;
  spec.kind = dgp_kind::lee_polynomial;
  spec.coef_left = {0.48, 1.27, 7.18, 20.21, 21.54, 7.33};
  spec.coef_right = {0.52, 0.84, -3.00, 7.99, -9.01, 3.56};
  return spec;
}

double dgp_mean(const dgp_spec& spec, double x, side_t side) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw error(errc::invalid_argument, "design point outside [-1,1]");
  }
  switch (spec.kind) {
    case dgp_kind::flat:
      return spec.level;
    case dgp_kind::worst_case_envelope:
      return side == side_t::treated ? std::min(0.5 + spec.c * std::abs(x), 1.0)
                                     : std::max(0.5 - spec.c * std::abs(x), 0.0);
    case dgp_kind::lee_polynomial: {
      const auto& coef = side == side_t::treated ? spec.coef_right : spec.coef_left;
      if (coef.empty()) {
        throw error(errc::invalid_argument, "lee model needs coefficients");
      }
      return std::clamp(polyval(coef, x), 0.0, 1.0);
    }
  }
  throw error(errc::invalid_argument, "unknown dgp kind");
}

double lee_true_lipschitz(const dgp_spec& spec) {
  constexpr int kScan = 20001;
  double best = 0.0;
  for (int i = 0; i < kScan; ++i) {
    const double t = static_cast<double>(i) / (kScan - 1);
    best = std::max(best, std::abs(polyder(spec.coef_right, t)));
    best = std::max(best, std::abs(polyder(spec.coef_left, -t)));
  }
  return best;
}

double dgp_tau(const dgp_spec& spec) {
  switch (spec.kind) {
    case dgp_kind::flat:
    case dgp_kind::worst_case_envelope:
      return 0.0;
    case dgp_kind::lee_polynomial:
      return std::clamp(polyval(spec.coef_right, 0.0), 0.0, 1.0) -
             std::clamp(polyval(spec.coef_left, 0.0), 0.0, 1.0);
  }
  return 0.0;
}

std::vector<double> equally_spaced_points(int n_obs) {
  if (n_obs < 2) throw error(errc::invalid_argument, "need at least 2 points");
  std::vector<double> xs(n_obs);
  for (int j = 1; j <= n_obs; ++j) {
    xs[j - 1] = -1.0 + (j - 0.5) * 2.0 / n_obs;
  }
  return xs;
}

double folded_normal_quantile(double b, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw error(errc::invalid_argument, "alpha must lie in (0,1)");
  }
  auto cdf = [&](double cc) { return normal_cdf(cc - b) - normal_cdf(-cc - b); };
  double lo = 0.0, hi = std::abs(b) + 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) >= 1.0 - alpha ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

study_report run_mc_study(const study_spec& spec) {
  if (spec.replications < 1 || spec.ci_replications < 0) {
    throw error(errc::invalid_argument, "replications must be >= 1");
  }
  study_report rep;
  rep.spec = spec;
  rep.tau_true = dgp_tau(spec.dgp);

  // Design points and per-observation means; outcomes are independent
  // Bernoulli at these means in every replication.
  const std::vector<double> xs = equally_spaced_points(spec.n_obs);
  std::vector<double> r_plus, r_minus;
  for (double x : xs) {
    (x >= 0.0 ? r_plus : r_minus).push_back(std::abs(x));
  }
  std::sort(r_plus.begin(), r_plus.end());
  std::sort(r_minus.begin(), r_minus.end());
  std::vector<double> p_plus(r_plus.size()), p_minus(r_minus.size());
  for (std::size_t i = 0; i < r_plus.size(); ++i) {
    p_plus[i] = dgp_mean(spec.dgp, r_plus[i], side_t::treated);
  }
  for (std::size_t i = 0; i < r_minus.size(); ++i) {
    p_minus[i] = dgp_mean(spec.dgp, -r_minus[i], side_t::control);
  }
  const std::size_t np = r_plus.size(), nm = r_minus.size();
  if (np == 0 || nm == 0) throw error(errc::empty_side, "design has an empty side");

  design d;
  d.treated = side_sample(r_plus, std::vector<double>(np, 0.0));
  d.control = side_sample(r_minus, std::vector<double>(nm, 0.0));

  const lipschitz_bound c_used(spec.c_used);
  solver_options sopts;
  sopts.seed = spec.seed;

  // Weights depend only on (radii, C): solve once, reuse across replications.
  weight_profile wb_p, wb_m, wg_p, wg_m, wu_p, wu_m;
  if (spec.estimators.rdbinary) {
    wb_p = solve_minimax_weights(r_plus, c_used, sopts).weights;
    wb_m = solve_minimax_weights(r_minus, c_used, sopts).weights;
  }
  if (spec.estimators.gauss) {
    wg_p = solve_gaussian_weights(r_plus, c_used, {}, sopts).weights;
    wg_m = solve_gaussian_weights(r_minus, c_used, {}, sopts).weights;
  }
  if (spec.estimators.unweighted) {
    wu_p = weight_profile(std::vector<double>(np, 1.0 / np), r_plus);
    wu_m = weight_profile(std::vector<double>(nm, 1.0 / nm), r_minus);
  }

  auto estimate = [&](const weight_profile& wp, const weight_profile& wm,
                      const std::vector<double>& yp, const std::vector<double>& ym) {
    double acc = 0.0;
    for (std::size_t i = 0; i < np; ++i) acc += wp[i] * (yp[i] - 0.5);
    for (std::size_t j = 0; j < nm; ++j) acc -= wm[j] * (ym[j] - 0.5);
    return acc;
  };

  // Calibration for the rdbinary interval: critical-value curves on the
  // tau0 lattice, inverted per replication.
  critical_curves curves;
  if (spec.estimators.rdbinary && spec.ci_replications > 0) {
    inference_options iopts;
    iopts.n_sims = spec.n_sims;
    iopts.seed = spec.seed;
    curves = calibrate_critical_curves(d, wb_p, wb_m, c_used, spec.alpha, iopts);
  }

  // Fixed-length gauss interval (folded-normal critical value).
  double gauss_halflength = 0.0;
  if (spec.estimators.gauss && spec.ci_replications > 0) {
    double sd2 = 0.0, maxbias = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      sd2 += 0.25 * wg_p[i] * wg_p[i];
      maxbias += spec.c_used * wg_p[i] * r_plus[i];
    }
    for (std::size_t j = 0; j < nm; ++j) {
      sd2 += 0.25 * wg_m[j] * wg_m[j];
      maxbias += spec.c_used * wg_m[j] * r_minus[j];
    }
    const double sd = std::sqrt(sd2);
    gauss_halflength =
        sd > 0.0 ? folded_normal_quantile(maxbias / sd, spec.alpha) * sd : maxbias;
  }

  // Constant-width concentration interval for the unweighted baseline.
  double unweighted_gamma = 0.0;
  if (spec.estimators.unweighted && spec.ci_replications > 0) {
    design d0 = d;  // outcomes irrelevant for the width
    const hoeffding_interval h =
        hoeffding_ci(d0, wu_p, wu_m, c_used, spec.alpha, sided_t::two_optimized);
    unweighted_gamma = h.gamma;
  }

  accum acc_b, acc_g, acc_u;
  std::vector<double> yp(np), ym(nm);
  const counter_rng point_rng(spec.seed, kPointDomain);
  const counter_rng ci_rng(spec.seed, kIntervalDomain);

  auto draw = [&](const counter_rng& rng, std::uint64_t rep_idx) {
    for (std::size_t i = 0; i < np; ++i) {
      yp[i] = rng.uniform(rep_idx, i) < p_plus[i] ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < nm; ++j) {
      ym[j] = rng.uniform(rep_idx, np + j) < p_minus[j] ? 1.0 : 0.0;
    }
  };

  for (int r = 0; r < spec.replications; ++r) {
    draw(point_rng, static_cast<std::uint64_t>(r));
    if (spec.estimators.rdbinary) {
      acc_b.err.push_back(estimate(wb_p, wb_m, yp, ym) - rep.tau_true);
    }
    if (spec.estimators.gauss) {
      acc_g.err.push_back(estimate(wg_p, wg_m, yp, ym) - rep.tau_true);
    }
    if (spec.estimators.unweighted) {
      acc_u.err.push_back(estimate(wu_p, wu_m, yp, ym) - rep.tau_true);
    }
  }

  for (int r = 0; r < spec.ci_replications; ++r) {
    draw(ci_rng, static_cast<std::uint64_t>(r));
    if (spec.estimators.rdbinary) {
      const double tau_hat = estimate(wb_p, wb_m, yp, ym);
      const auto [lo, hi] = invert_critical_curves(curves, tau_hat);
      const bool ok = std::isfinite(lo);
      acc_b.lengths.push_back(ok ? hi - lo : 0.0);
      acc_b.covered += ok && lo <= rep.tau_true && rep.tau_true <= hi;
      ++acc_b.ci_reps;
    }
    if (spec.estimators.gauss) {
      const double tau_hat = estimate(wg_p, wg_m, yp, ym);
      const double lo = tau_hat - gauss_halflength, hi = tau_hat + gauss_halflength;
      acc_g.lengths.push_back(hi - lo);
      acc_g.covered += lo <= rep.tau_true && rep.tau_true <= hi;
      ++acc_g.ci_reps;
    }
    if (spec.estimators.unweighted) {
      const double tau_hat = estimate(wu_p, wu_m, yp, ym);
      const double lo = tau_hat - unweighted_gamma, hi = tau_hat + unweighted_gamma;
      acc_u.lengths.push_back(hi - lo);
      acc_u.covered += lo <= rep.tau_true && rep.tau_true <= hi;
      ++acc_u.ci_reps;
    }
  }

  if (spec.estimators.rdbinary) acc_b.finalize(rep.rdbinary);
  if (spec.estimators.gauss) acc_g.finalize(rep.gauss);
  if (spec.estimators.unweighted) acc_u.finalize(rep.unweighted);
  return rep;
}

}  // namespace rdb
