#include "rdbinary.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "core/gauss_compare.hpp"
#include "core/inference.hpp"
#include "core/rot.hpp"
#include "core/simulation.hpp"
#include "core/solver.hpp"
#include "core/types.hpp"
#include "core/worst_case.hpp"

struct rdb_design {
  rdb::design d;
};

namespace {

rdb_status map_error(rdb::errc code) {
  switch (code) {
    case rdb::errc::empty_side:
      return RDB_ERR_EMPTY_SIDE;
    case rdb::errc::out_of_range_outcome:
    case rdb::errc::anchor_out_of_range:
      return RDB_ERR_OUT_OF_RANGE;
    case rdb::errc::length_mismatch:
      return RDB_ERR_LENGTH_MISMATCH;
    case rdb::errc::too_large:
      return RDB_ERR_TOO_LARGE;
    case rdb::errc::insufficient_data:
      return RDB_ERR_INSUFFICIENT_DATA;
    case rdb::errc::numeric:
      return RDB_ERR_NUMERIC;
    default:
      return RDB_ERR_INVALID_ARGUMENT;
  }
}

template <typename Fn>
rdb_status guarded(Fn&& fn) {
  try {
    fn();
    return RDB_OK;
  } catch (const rdb::error& e) {
    return map_error(e.code());
  } catch (const std::bad_alloc&) {
    return RDB_ERR_NUMERIC;
  } catch (const std::exception&) {
    return RDB_ERR_INVALID_ARGUMENT;
  }
}

const rdb::side_sample& pick_side(const rdb_design* d, rdb_side side) {
  return side == RDB_TREATED ? d->d.treated : d->d.control;
}

rdb::solver_options to_solver_options(const rdb_solver_options* opts) {
  rdb::solver_options out;
  if (opts != nullptr) {
    out.tol = opts->tol;
    out.max_iter = opts->max_iter;
    out.restarts = opts->restarts;
    out.anchor_grid = opts->anchor_grid;
    out.seed = opts->seed;
  }
  return out;
}

rdb::inference_options to_inference_options(const rdb_inference_options* opts) {
  rdb::inference_options out;
  if (opts != nullptr) {
    out.n_sims = opts->n_sims;
    out.anchor_lattice = opts->anchor_lattice;
    out.bisect_iters = opts->bisect_iters;
    out.seed = opts->seed;
    out.method = opts->exact ? rdb::calib_method::exact : rdb::calib_method::monte_carlo;
  }
  return out;
}

rdb::weight_profile make_weights(const double* w, const rdb::side_sample& side) {
  if (w == nullptr && side.size() > 0) {
    throw rdb::error(rdb::errc::invalid_argument, "null weight buffer");
  }
  return rdb::weight_profile(std::vector<double>(w, w + side.size()), side.radii,
                             /*shrinkage=*/false);
}

rdb::study_spec to_study_spec(const rdb_study_spec* spec) {
  if (spec == nullptr) {
    throw rdb::error(rdb::errc::invalid_argument, "null study spec");
  }
  rdb::study_spec out;
  switch (spec->dgp) {
    case RDB_DGP_LEE: {
      out.dgp = rdb::default_lee_spec();
      if (spec->coef_left != nullptr && spec->n_coef_left > 0) {
        out.dgp.coef_left.assign(spec->coef_left, spec->coef_left + spec->n_coef_left);
      }
      if (spec->coef_right != nullptr && spec->n_coef_right > 0) {
        out.dgp.coef_right.assign(spec->coef_right,
                                  spec->coef_right + spec->n_coef_right);
      }
      break;
    }
    case RDB_DGP_WORST_CASE:
      out.dgp.kind = rdb::dgp_kind::worst_case_envelope;
      out.dgp.c = spec->dgp_c;
      break;
    case RDB_DGP_FLAT:
      out.dgp.kind = rdb::dgp_kind::flat;
      out.dgp.level = spec->flat_level;
      break;
    default:
      throw rdb::error(rdb::errc::invalid_argument, "unknown dgp kind");
  }
  out.n_obs = spec->n_obs;
  out.replications = spec->replications;
  out.ci_replications = spec->ci_replications;
  out.alpha = spec->alpha;
  out.c_used = spec->c_used;
  out.n_sims = spec->n_sims;
  out.seed = spec->seed;
  out.estimators.rdbinary = spec->with_rdbinary != 0;
  out.estimators.gauss = spec->with_gauss != 0;
  out.estimators.unweighted = spec->with_unweighted != 0;
  return out;
}

void copy_stats(const rdb::estimator_stats& in, rdb_estimator_stats* out) {
  out->present = in.present ? 1 : 0;
  out->root_mse = in.root_mse;
  out->root_mse_se = in.root_mse_se;
  out->bias = in.bias;
  out->bias_se = in.bias_se;
  out->mean_ci_length = in.mean_ci_length;
  out->ci_length_se = in.ci_length_se;
  out->coverage = in.coverage;
  out->coverage_se = in.coverage_se;
}

}  // namespace

const char* rdb_status_message(rdb_status status) {
  switch (status) {
    case RDB_OK:
      return "ok";
    case RDB_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case RDB_ERR_EMPTY_SIDE:
      return "a design side has no observations";
    case RDB_ERR_OUT_OF_RANGE:
      return "value out of range";
    case RDB_ERR_LENGTH_MISMATCH:
      return "length mismatch";
    case RDB_ERR_TOO_LARGE:
      return "problem too large for exact enumeration";
    case RDB_ERR_NUMERIC:
      return "numerical failure";
    case RDB_ERR_INSUFFICIENT_DATA:
      return "insufficient data";
  }
  return "unknown status";
}

const char* rdb_version(void) { return "0.1.0"; }

rdb_status rdb_design_create(const double* r, const double* y, size_t n, double cutoff,
                             rdb_design** out) {
  if (r == nullptr || y == nullptr || out == nullptr || n == 0) {
    return RDB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::vector<rdb::point> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = {r[i], y[i]};
    auto* handle = new rdb_design{rdb::normalize_design(pts, cutoff)};
    *out = handle;
  });
}

rdb_status rdb_design_create_recentered(const double* radii_plus, const double* y_plus,
                                        size_t n_plus, const double* radii_minus,
                                        const double* y_minus, size_t n_minus,
                                        rdb_design** out) {
  if (out == nullptr || (n_plus > 0 && (radii_plus == nullptr || y_plus == nullptr)) ||
      (n_minus > 0 && (radii_minus == nullptr || y_minus == nullptr))) {
    return RDB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    rdb::design d;
    d.treated = rdb::side_sample(std::vector<double>(radii_plus, radii_plus + n_plus),
                                 std::vector<double>(y_plus, y_plus + n_plus));
    d.control = rdb::side_sample(std::vector<double>(radii_minus, radii_minus + n_minus),
                                 std::vector<double>(y_minus, y_minus + n_minus));
    *out = new rdb_design{std::move(d)};
  });
}

void rdb_design_free(rdb_design* d) { delete d; }

size_t rdb_design_size(const rdb_design* d, rdb_side side) {
  if (d == nullptr) return 0;
  return pick_side(d, side).size();
}

rdb_status rdb_design_radii(const rdb_design* d, rdb_side side, double* buf) {
  if (d == nullptr || buf == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  const auto& s = pick_side(d, side);
  std::memcpy(buf, s.radii.data(), s.radii.size() * sizeof(double));
  return RDB_OK;
}

rdb_status rdb_design_outcomes(const rdb_design* d, rdb_side side, double* buf) {
  if (d == nullptr || buf == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  const auto& s = pick_side(d, side);
  std::memcpy(buf, s.outcomes.data(), s.outcomes.size() * sizeof(double));
  return RDB_OK;
}

rdb_solver_options rdb_solver_options_default(void) {
  const rdb::solver_options defaults;
  rdb_solver_options out;
  out.tol = defaults.tol;
  out.max_iter = defaults.max_iter;
  out.restarts = defaults.restarts;
  out.anchor_grid = defaults.anchor_grid;
  out.seed = defaults.seed;
  return out;
}

rdb_status rdb_solve_minimax_weights(const double* radii, size_t n, double lipschitz,
                                     const rdb_solver_options* opts, double* weights_out,
                                     double* worst_mse_out) {
  if (radii == nullptr || weights_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const rdb::solve_result res = rdb::solve_minimax_weights(
        std::span<const double>(radii, n), rdb::lipschitz_bound(lipschitz),
        to_solver_options(opts));
    std::memcpy(weights_out, res.weights.values().data(), n * sizeof(double));
    if (worst_mse_out != nullptr) *worst_mse_out = res.value;
  });
}

rdb_status rdb_solve_gaussian_weights(const double* radii, size_t n, double lipschitz,
                                      const double* sigma2,
                                      const rdb_solver_options* opts,
                                      double* weights_out, double* value_out) {
  if (radii == nullptr || weights_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const std::span<const double> s2 =
        sigma2 == nullptr ? std::span<const double>() : std::span<const double>(sigma2, n);
    const rdb::solve_result res = rdb::solve_gaussian_weights(
        std::span<const double>(radii, n), rdb::lipschitz_bound(lipschitz), s2,
        to_solver_options(opts));
    std::memcpy(weights_out, res.weights.values().data(), n * sizeof(double));
    if (value_out != nullptr) *value_out = res.value;
  });
}

rdb_status rdb_solve_ate_weights(const rdb_design* d, double lipschitz,
                                 const rdb_solver_options* opts, double* w_plus_out,
                                 double* w_minus_out, double* worst_mse_out) {
  if (d == nullptr || w_plus_out == nullptr || w_minus_out == nullptr) {
    return RDB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto [res_p, res_m] = rdb::solve_ate_weights(
        d->d, rdb::lipschitz_bound(lipschitz), to_solver_options(opts));
    std::memcpy(w_plus_out, res_p.weights.values().data(),
                d->d.treated.size() * sizeof(double));
    std::memcpy(w_minus_out, res_m.weights.values().data(),
                d->d.control.size() * sizeof(double));
    if (worst_mse_out != nullptr) *worst_mse_out = res_p.value;
  });
}

rdb_status rdb_worst_case_mse(const double* w, const double* radii, size_t n,
                              double lipschitz, double* value_out, double* argmax_out) {
  if ((n > 0 && (w == nullptr || radii == nullptr)) || value_out == nullptr) {
    return RDB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::span<const double> rs(radii, n);
    const rdb::weight_profile wp(std::vector<double>(w, w + n), rs, false);
    const rdb::worst_case_report rep =
        rdb::gbar_closed(wp, rdb::lipschitz_bound(lipschitz), rs);
    *value_out = rep.value;
    if (argmax_out != nullptr) *argmax_out = rep.anchor;
  });
}

rdb_status rdb_ate_worst_case_mse(const rdb_design* d, const double* w_plus,
                                  const double* w_minus, double lipschitz, int grid_m,
                                  double* value_out, double* argmax_plus_out,
                                  double* argmax_minus_out) {
  if (d == nullptr || value_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const rdb::worst_case_report rep = rdb::ate_worst_case_mse(
        make_weights(w_plus, d->d.treated), make_weights(w_minus, d->d.control),
        rdb::lipschitz_bound(lipschitz), d->d, grid_m > 0 ? grid_m : 101);
    *value_out = rep.value;
    if (argmax_plus_out != nullptr) *argmax_plus_out = rep.anchor;
    if (argmax_minus_out != nullptr) *argmax_minus_out = rep.anchor_minus;
  });
}

rdb_status rdb_estimate(const rdb_design* d, const double* w_plus, const double* w_minus,
                        double* tau_out) {
  if (d == nullptr || tau_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *tau_out = rdb::ate_estimate(d->d, make_weights(w_plus, d->d.treated),
                                 make_weights(w_minus, d->d.control));
  });
}

rdb_inference_options rdb_inference_options_default(void) {
  const rdb::inference_options defaults;
  rdb_inference_options out;
  out.n_sims = defaults.n_sims;
  out.anchor_lattice = defaults.anchor_lattice;
  out.bisect_iters = defaults.bisect_iters;
  out.seed = defaults.seed;
  out.exact = 0;
  return out;
}

rdb_status rdb_critical_value(const rdb_design* d, const double* w_plus,
                              const double* w_minus, double lipschitz, double tau0,
                              double alpha, rdb_direction dir,
                              const rdb_inference_options* opts, double* gamma_out) {
  if (d == nullptr || gamma_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *gamma_out = rdb::critical_value(
        d->d, make_weights(w_plus, d->d.treated), make_weights(w_minus, d->d.control),
        rdb::lipschitz_bound(lipschitz), tau0, alpha,
        dir == RDB_RIGHT ? rdb::direction_t::right : rdb::direction_t::left,
        to_inference_options(opts));
  });
}

rdb_status rdb_worst_rejection(const rdb_design* d, const double* w_plus,
                               const double* w_minus, double lipschitz, double tau0,
                               double gamma, rdb_direction dir,
                               const rdb_inference_options* opts, double* prob_out) {
  if (d == nullptr || prob_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *prob_out = rdb::worst_rejection(
        d->d, make_weights(w_plus, d->d.treated), make_weights(w_minus, d->d.control),
        rdb::lipschitz_bound(lipschitz), tau0, gamma,
        dir == RDB_RIGHT ? rdb::direction_t::right : rdb::direction_t::left,
        to_inference_options(opts));
  });
}

rdb_status rdb_confidence_interval(const rdb_design* d, const double* w_plus,
                                   const double* w_minus, double lipschitz, double alpha,
                                   const rdb_inference_options* opts, double* lower_out,
                                   double* upper_out) {
  if (d == nullptr || lower_out == nullptr || upper_out == nullptr) {
    return RDB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto [lo, hi] = rdb::confidence_interval(
        d->d, make_weights(w_plus, d->d.treated), make_weights(w_minus, d->d.control),
        rdb::lipschitz_bound(lipschitz), alpha, to_inference_options(opts));
    *lower_out = lo;
    *upper_out = hi;
  });
}

rdb_status rdb_max_abs_bias(const rdb_design* d, const double* w_plus,
                            const double* w_minus, double lipschitz, double* bias_out) {
  if (d == nullptr || bias_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *bias_out = rdb::max_abs_bias(d->d, make_weights(w_plus, d->d.treated),
                                  make_weights(w_minus, d->d.control),
                                  rdb::lipschitz_bound(lipschitz));
  });
}

rdb_status rdb_hoeffding_interval(const rdb_design* d, const double* w_plus,
                                  const double* w_minus, double lipschitz, double alpha,
                                  rdb_hoeffding_mode mode, double* lower_out,
                                  double* upper_out, double* gamma_out) {
  if (d == nullptr || lower_out == nullptr || upper_out == nullptr) {
    return RDB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    rdb::sided_t sided = rdb::sided_t::two_optimized;
    if (mode == RDB_HOEFFDING_ONE_SIDED) sided = rdb::sided_t::one;
    if (mode == RDB_HOEFFDING_TWO_NAIVE) sided = rdb::sided_t::two_naive;
    const rdb::hoeffding_interval h = rdb::hoeffding_ci(
        d->d, make_weights(w_plus, d->d.treated), make_weights(w_minus, d->d.control),
        rdb::lipschitz_bound(lipschitz), alpha, sided);
    *lower_out = h.lower;
    *upper_out = h.upper;
    if (gamma_out != nullptr) *gamma_out = h.gamma;
  });
}

rdb_status rdb_compare_worst_case(const double* radii, size_t n, double lipschitz,
                                  const rdb_solver_options* opts, rdb_ratio_report* out) {
  if (radii == nullptr || out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const rdb::ratio_report rep =
        rdb::compare_worst_case(std::span<const double>(radii, n),
                                rdb::lipschitz_bound(lipschitz), to_solver_options(opts));
    out->n = rep.n;
    out->lipschitz = rep.c;
    out->value_binary = rep.value_binary;
    out->value_gauss_under_binary = rep.value_gauss_under_binary;
    out->ratio_mse = rep.ratio_mse;
    out->ratio_root_mse = rep.ratio_root_mse;
    out->u_hat = rep.u_hat;
    out->lemma_upper = rep.lemma_upper;
    out->lemma_cap = rep.lemma_cap;
    out->degenerate = rep.degenerate ? 1 : 0;
  });
}

rdb_study_spec rdb_study_spec_default(void) {
  rdb_study_spec spec;
  std::memset(&spec, 0, sizeof(spec));
  spec.dgp = RDB_DGP_FLAT;
  spec.dgp_c = 0.5;
  spec.flat_level = 0.5;
  spec.n_obs = 100;
  spec.replications = 3000;
  spec.ci_replications = 1500;
  spec.alpha = 0.05;
  spec.c_used = 0.5;
  spec.n_sims = 3000;
  spec.seed = 20240501;
  spec.with_rdbinary = 1;
  spec.with_gauss = 1;
  spec.with_unweighted = 0;
  return spec;
}

rdb_status rdb_run_study(const rdb_study_spec* spec, rdb_study_report* out) {
  if (spec == nullptr || out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const rdb::study_report rep = rdb::run_mc_study(to_study_spec(spec));
    out->tau_true = rep.tau_true;
    copy_stats(rep.rdbinary, &out->rdbinary);
    copy_stats(rep.gauss, &out->gauss);
    copy_stats(rep.unweighted, &out->unweighted);
  });
}

rdb_status rdb_dgp_mean(const rdb_study_spec* spec, double x, rdb_side side,
                        double* mean_out) {
  if (spec == nullptr || mean_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const rdb::study_spec s = to_study_spec(spec);
    *mean_out = rdb::dgp_mean(s.dgp, x,
                              side == RDB_TREATED ? rdb::side_t::treated
                                                  : rdb::side_t::control);
  });
}

rdb_status rdb_lee_true_lipschitz(const rdb_study_spec* spec, double* c_out) {
  if (spec == nullptr || c_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const rdb::study_spec s = to_study_spec(spec);
    if (s.dgp.kind != rdb::dgp_kind::lee_polynomial) {
      throw rdb::error(rdb::errc::invalid_argument, "not a lee model");
    }
    *c_out = rdb::lee_true_lipschitz(s.dgp);
  });
}

rdb_status rdb_rot_c(const rdb_design* d, int bins, double* c_out, double* c_plus_out,
                     double* c_minus_out) {
  if (d == nullptr || c_out == nullptr) return RDB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const rdb::rot_result res = rdb::rot_lipschitz(d->d, bins > 0 ? bins : 10);
    *c_out = res.c;
    if (c_plus_out != nullptr) *c_plus_out = res.c_plus;
    if (c_minus_out != nullptr) *c_minus_out = res.c_minus;
  });
}
