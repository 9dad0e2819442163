#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "types.hpp"

namespace rdb {

enum class direction_t { right, left };
enum class comparison_t { greater, less };
enum class sided_t { one, two_naive, two_optimized };
enum class calib_method { exact, monte_carlo };

struct inference_options {
  int n_sims = 3000;
  /// Anchor lattice denominator: candidate anchors are k/anchor_lattice
  /// intersected with the valid range (range endpoints always included).
  int anchor_lattice = 200;
  int bisect_iters = 20;
  std::uint64_t seed = 20240501;
  calib_method method = calib_method::monte_carlo;
  /// Max n_+ + n_- for exact enumeration and achievable-value candidates;
  /// larger designs use a uniform candidate grid of `candidate_step`.
  int enum_limit = 22;
  double candidate_step = 1e-3;
};

/// Joint Bernoulli parameter profile; entry 0 of each side is the boundary
/// anchor, entries 1..n the observation means.
struct bernoulli_joint_profile {
  std::vector<double> p_plus;
  std::vector<double> p_minus;
};

/// Calibration record for one hypothesized tau0 (two-sided).
struct test_calibration {
  double tau0 = 0.0;
  double alpha = 0.0;
  double gamma_right = 0.0;
  double gamma_left = 0.0;
  int anchor_lattice = 0;
  int n_sims = 0;
  std::uint64_t seed = 0;
  calib_method method = calib_method::monte_carlo;
};

/// Least-favorable envelope profiles for the one-sided test at anchor p.
/// direction right: treated means pushed up, control means pushed down;
/// direction left mirrors both.
bernoulli_joint_profile envelope_p_profiles(double p, double tau0, lipschitz_bound c,
                                            const design& d, direction_t dir);

/// P(statistic >/< gamma) by exhaustive enumeration of all outcome vectors.
/// Requires n_+ + n_- <= 22. Strict inequality.
double rejection_prob_exact(const weight_profile& w_plus, const weight_profile& w_minus,
                            const bernoulli_joint_profile& profile, double gamma,
                            comparison_t cmp);

/// Monte Carlo estimate of the same probability; deterministic given seed
/// (counter-based draws, one stream per simulation).
double rejection_prob_mc(const weight_profile& w_plus, const weight_profile& w_minus,
                         const bernoulli_joint_profile& profile, double gamma,
                         comparison_t cmp, int n_sims, std::uint64_t seed);

/// Worst rejection probability over the anchor lattice at a fixed gamma,
/// with common random numbers shared across anchors in Monte Carlo mode.
double worst_rejection(const design& d, const weight_profile& w_plus,
                       const weight_profile& w_minus, lipschitz_bound c, double tau0,
                       double gamma, direction_t dir, const inference_options& opts);

/// Smallest gamma (largest for direction left) over the candidate set whose
/// worst rejection probability is <= alpha.
double critical_value(const design& d, const weight_profile& w_plus,
                      const weight_profile& w_minus, lipschitz_bound c, double tau0,
                      double alpha, direction_t dir, const inference_options& opts);

/// Two-sided calibration (alpha/2 per tail) at one hypothesized tau0.
test_calibration calibrate_test(const design& d, const weight_profile& w_plus,
                                const weight_profile& w_minus, lipschitz_bound c,
                                double tau0, double alpha,
                                const inference_options& opts);

/// Test-inversion confidence interval, endpoints located by the geometric
/// halving walk (bisect_iters halvings) with pre-checks at -1 and +1.
std::pair<double, double> confidence_interval(const design& d,
                                              const weight_profile& w_plus,
                                              const weight_profile& w_minus,
                                              lipschitz_bound c, double alpha,
                                              const inference_options& opts);

/// Maximum bias of the estimator over the Lipschitz-feasible mean profiles;
/// by centrosymmetry the minimum bias is its negative.
double max_abs_bias(const design& d, const weight_profile& w_plus,
                    const weight_profile& w_minus, lipschitz_bound c);

struct hoeffding_interval {
  double lower = 0.0;
  double upper = 0.0;
  double gamma = 0.0;
};

/// Concentration-bound interval for bounded outcomes. `two_optimized` solves
/// the inner maximization over the realized bias instead of the naive
/// log(2/alpha) bound and is strictly tighter whenever the max bias is
/// positive.
hoeffding_interval hoeffding_ci(const design& d, const weight_profile& w_plus,
                                const weight_profile& w_minus, lipschitz_bound c,
                                double alpha, sided_t sided);

/// Critical-value curves on the tau0 lattice (step 1/anchor_lattice across
/// [-1,1], two-sided alpha/2 per tail). At lattice tau0 values the entries
/// coincide with critical_value; curves are nondecreasing in tau0.
struct critical_curves {
  int lattice = 0;
  std::vector<double> tau0s;
  std::vector<double> gamma_right;
  std::vector<double> gamma_left;
};

critical_curves calibrate_critical_curves(const design& d, const weight_profile& w_plus,
                                          const weight_profile& w_minus,
                                          lipschitz_bound c, double alpha,
                                          const inference_options& opts);

/// Retained-set hull [lo, hi] for an observed estimate; (NaN, NaN) if no
/// lattice point is retained.
std::pair<double, double> invert_critical_curves(const critical_curves& curves,
                                                 double tau_hat);

}  // namespace rdb
