#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace rdb {

enum class dgp_kind { lee_polynomial, worst_case_envelope, flat };
enum class side_t { treated, control };

/// Conditional-mean model for a binary outcome on [-1,1] around cutoff 0.
/// lee_polynomial: per-side polynomial coefficients (ascending powers of the
/// signed running variable), clipped to [0,1]. worst_case_envelope: means
/// fanning out from 1/2 at the boundary at slope c. flat: constant level.
struct dgp_spec {
  dgp_kind kind = dgp_kind::flat;
  double c = 0.5;       // worst_case_envelope slope
  double level = 0.5;   // flat level
  std::vector<double> coef_left;   // control side, x in [-1,0]
  std::vector<double> coef_right;  // treated side, x in [0,1]
};

/// The standard fifth-degree polynomial approximation of the Lee (2008)
/// house-election regression functions; also shipped in configs/lee_dgp.cfg.
dgp_spec default_lee_spec();

double dgp_mean(const dgp_spec& spec, double x, side_t side);

/// Largest |d mean/dx| of the configured polynomials over their side domains
/// (numerical scan); the smallest Lipschitz constant the lee model satisfies.
double lee_true_lipschitz(const dgp_spec& spec);

/// True jump at the cutoff implied by the model.
double dgp_tau(const dgp_spec& spec);

struct estimator_flags {
  bool rdbinary = true;
  bool gauss = true;
  bool unweighted = false;
};

struct study_spec {
  dgp_spec dgp;
  int n_obs = 100;             // total observations, equally spaced on [-1,1]
  int replications = 3000;     // point-estimate draws
  int ci_replications = 1500;  // interval draws
  double alpha = 0.05;
  double c_used = 0.5;         // Lipschitz constant handed to the estimators
  int n_sims = 3000;           // calibration draws per tail
  std::uint64_t seed = 20240501;
  estimator_flags estimators;
};

struct estimator_stats {
  bool present = false;
  double root_mse = 0.0, root_mse_se = 0.0;
  double bias = 0.0, bias_se = 0.0;
  double mean_ci_length = 0.0, ci_length_se = 0.0;
  double coverage = 0.0, coverage_se = 0.0;
};

struct study_report {
  study_spec spec;
  double tau_true = 0.0;
  estimator_stats rdbinary;
  estimator_stats gauss;
  estimator_stats unweighted;
};

/// Design points -1 + (j - 1/2) * 2/N, j = 1..N (midpoints of a uniform
/// partition of [-1,1]; N/2 per side for even N, never exactly 0).
std::vector<double> equally_spaced_points(int n_obs);

/// Monte Carlo study: weights solved once per design (they do not depend on
/// outcomes), rdbinary intervals by critical-curve inversion, gauss by the
/// fixed-length folded-normal interval, unweighted by the optimized
/// concentration interval. Deterministic given the seed.
study_report run_mc_study(const study_spec& spec);

/// 1-alpha quantile of |N(b,1)| (folded normal), by bisection on the CDF.
double folded_normal_quantile(double b, double alpha);

}  // namespace rdb
