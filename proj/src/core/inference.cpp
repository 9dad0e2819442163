#include "inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rng.hpp"

namespace rdb {

namespace {

constexpr double kEps = 1e-12;
constexpr std::uint64_t kCalibrationDomain = 1;

double anchor_lo(double tau0) { return std::max(0.0, tau0); }
double anchor_hi(double tau0) { return std::min(1.0, 1.0 + tau0); }

void check_tau0(double tau0) {
  if (!(tau0 >= -1.0 && tau0 <= 1.0)) {
    throw error(errc::invalid_argument, "tau0 must lie in [-1,1]");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw error(errc::invalid_argument, "alpha must lie in (0,1)");
  }
}

// Lattice anchors k/L within [lo(tau0), hi(tau0)], range endpoints included.
std::vector<double> anchor_grid(double tau0, int lattice) {
  const double lo = anchor_lo(tau0), hi = anchor_hi(tau0);
  std::vector<double> out;
  out.push_back(lo);
  const int k0 = static_cast<int>(std::ceil(lo * lattice - 1e-9));
  const int k1 = static_cast<int>(std::floor(hi * lattice + 1e-9));
  for (int k = k0; k <= k1; ++k) {
    const double p = static_cast<double>(k) / lattice;
    if (p > out.back() + kEps && p < hi - kEps) out.push_back(p);
  }
  if (hi > out.back() + kEps) out.push_back(hi);
  return out;
}

// All 2^(n+ + n-) statistic values with their outcome masks, sorted by value.
// Bit i < n_+ flips treated outcome i; bit n_+ + j flips control outcome j.
struct enum_table {
  std::size_t n_plus = 0, n_minus = 0;
  std::vector<double> stats;            // sorted ascending
  std::vector<std::uint32_t> masks;     // aligned with stats
};

enum_table build_enum_table(const weight_profile& w_plus, const weight_profile& w_minus,
                            int enum_limit) {
  const std::size_t n = w_plus.size() + w_minus.size();
  if (n > static_cast<std::size_t>(enum_limit) || n > 22) {
    throw error(errc::too_large, "exact enumeration limited to n_+ + n_- <= 22");
  }
  enum_table t;
  t.n_plus = w_plus.size();
  t.n_minus = w_minus.size();
  const std::size_t total = std::size_t{1} << n;
  t.stats.resize(total);
  t.masks.resize(total);
  const double base = -0.5 * w_plus.shrinkage_mass() + 0.5 * w_minus.shrinkage_mass();
  for (std::size_t mask = 0; mask < total; ++mask) {
    double s = base;
    for (std::size_t i = 0; i < t.n_plus; ++i) {
      if (mask & (std::size_t{1} << i)) s += w_plus[i];
    }
    for (std::size_t j = 0; j < t.n_minus; ++j) {
      if (mask & (std::size_t{1} << (t.n_plus + j))) s -= w_minus[j];
    }
    t.stats[mask] = s;
    t.masks[mask] = static_cast<std::uint32_t>(mask);
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return t.stats[a] < t.stats[b]; });
  enum_table sorted;
  sorted.n_plus = t.n_plus;
  sorted.n_minus = t.n_minus;
  sorted.stats.reserve(total);
  sorted.masks.reserve(total);
  for (std::size_t idx : order) {
    sorted.stats.push_back(t.stats[idx]);
    sorted.masks.push_back(t.masks[idx]);
  }
  return sorted;
}

// Outcome-vector probabilities under a joint profile, in table order.
void outcome_probs(const enum_table& t, const bernoulli_joint_profile& prof,
                   std::vector<double>& out) {
  const std::size_t total = t.stats.size();
  out.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::uint32_t mask = t.masks[idx];
    double p = 1.0;
    for (std::size_t i = 0; i < t.n_plus; ++i) {
      const double pi = prof.p_plus[i + 1];
      p *= (mask & (1u << i)) ? pi : 1.0 - pi;
    }
    for (std::size_t j = 0; j < t.n_minus; ++j) {
      const double pj = prof.p_minus[j + 1];
      p *= (mask & (1u << (t.n_plus + j))) ? pj : 1.0 - pj;
    }
    out[idx] = p;
  }
}

// Candidate gammas: achievable statistic values plus midpoints for
// enumerable designs, otherwise a uniform grid over the statistic's range.
struct candidate_set {
  std::vector<double> values;  // sorted ascending
};

candidate_set make_candidates(const weight_profile& w_plus,
                              const weight_profile& w_minus,
                              const inference_options& opts) {
  candidate_set cs;
  const std::size_t n = w_plus.size() + w_minus.size();
  if (n <= static_cast<std::size_t>(opts.enum_limit) && n <= 22) {
    const enum_table t = build_enum_table(w_plus, w_minus, opts.enum_limit);
    std::vector<double> uniq;
    uniq.reserve(t.stats.size());
    for (double v : t.stats) {
      if (uniq.empty() || v > uniq.back() + kEps) uniq.push_back(v);
    }
    cs.values.reserve(2 * uniq.size());
    for (std::size_t i = 0; i < uniq.size(); ++i) {
      if (i > 0) cs.values.push_back(0.5 * (uniq[i - 1] + uniq[i]));
      cs.values.push_back(uniq[i]);
    }
  } else {
    const double m = 0.5 * (w_plus.shrinkage_mass() + w_minus.shrinkage_mass());
    const long j1 = static_cast<long>(std::ceil(m / opts.candidate_step + 1e-9));
    cs.values.reserve(2 * j1 + 1);
    for (long j = -j1; j <= j1; ++j) cs.values.push_back(j * opts.candidate_step);
  }
  return cs;
}

double snap_up(const candidate_set& cs, double v) {
  auto it = std::lower_bound(cs.values.begin(), cs.values.end(), v - kEps);
  return it == cs.values.end() ? cs.values.back() : *it;
}

double snap_down(const candidate_set& cs, double v) {
  auto it = std::upper_bound(cs.values.begin(), cs.values.end(), v + kEps);
  return it == cs.values.begin() ? cs.values.front() : *(it - 1);
}

// Smallest achievable value whose exact right-tail probability is <= alpha
// (largest with left-tail <= alpha for direction left). Walks tie blocks
// from the extreme end; the extreme value always qualifies since the strict
// tail beyond it is empty.
double exact_min_gamma(const enum_table& t, const std::vector<double>& probs,
                       double alpha, direction_t dir) {
  const std::size_t total = t.stats.size();
  if (dir == direction_t::right) {
    double tail = 0.0;  // P(stat > current block's value)
    double gamma = t.stats.back();
    std::size_t hi = total;  // exclusive upper end of the current block
    while (hi > 0) {
      std::size_t lo = hi - 1;
      double block = probs[lo];
      while (lo > 0 && t.stats[lo - 1] > t.stats[hi - 1] - kEps) {
        --lo;
        block += probs[lo];
      }
      if (tail > alpha + kEps) break;
      gamma = t.stats[lo];
      tail += block;
      hi = lo;
    }
    return gamma;
  }
  double head = 0.0;  // P(stat < current block's value)
  double gamma = t.stats.front();
  std::size_t lo = 0;
  while (lo < total) {
    std::size_t hi = lo;
    double block = probs[hi];
    while (hi + 1 < total && t.stats[hi + 1] < t.stats[lo] + kEps) {
      ++hi;
      block += probs[hi];
    }
    if (head > alpha + kEps) break;
    gamma = t.stats[lo];
    head += block;
    lo = hi + 1;
  }
  return gamma;
}

// Monte Carlo statistics for one profile under common random numbers
// U[s * n + i]; treated entries first.
void mc_statistics(const weight_profile& w_plus, const weight_profile& w_minus,
                   const bernoulli_joint_profile& prof, const std::vector<double>& u,
                   int n_sims, std::vector<double>& out) {
  const std::size_t np = w_plus.size(), nm = w_minus.size();
  const std::size_t n = np + nm;
  out.resize(n_sims);
  for (int s = 0; s < n_sims; ++s) {
    const double* us = u.data() + static_cast<std::size_t>(s) * n;
    double acc = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      acc += w_plus[i] * ((us[i] < prof.p_plus[i + 1] ? 1.0 : 0.0) - 0.5);
    }
    for (std::size_t j = 0; j < nm; ++j) {
      acc -= w_minus[j] * ((us[np + j] < prof.p_minus[j + 1] ? 1.0 : 0.0) - 0.5);
    }
    out[s] = acc;
  }
}

std::vector<double> draw_crn(std::size_t n, int n_sims, std::uint64_t seed) {
  const counter_rng rng(seed, kCalibrationDomain);
  std::vector<double> u(static_cast<std::size_t>(n_sims) * n);
  for (int s = 0; s < n_sims; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      u[static_cast<std::size_t>(s) * n + i] = rng.uniform(s, i);
    }
  }
  return u;
}

// Order statistic defining the per-anchor minimal (maximal) gamma under CRN:
// the (k_allow+1)-th largest (smallest) simulated statistic.
double mc_boundary_stat(std::vector<double>& stats, int k_allow, direction_t dir) {
  const std::size_t n = stats.size();
  if (dir == direction_t::right) {
    const std::size_t pos = n - static_cast<std::size_t>(k_allow) - 1;
    std::nth_element(stats.begin(), stats.begin() + pos, stats.end());
    return stats[pos];
  }
  const std::size_t pos = static_cast<std::size_t>(k_allow);
  std::nth_element(stats.begin(), stats.begin() + pos, stats.end());
  return stats[pos];
}

int allowed_count(double alpha, int n_sims) {
  return static_cast<int>(std::floor(alpha * n_sims + 1e-9));
}

}  // namespace

bernoulli_joint_profile envelope_p_profiles(double p, double tau0, lipschitz_bound c,
                                            const design& d, direction_t dir) {
  check_tau0(tau0);
  const double lo = anchor_lo(tau0), hi = anchor_hi(tau0);
  if (!(p >= lo - kEps && p <= hi + kEps)) {
    throw error(errc::anchor_out_of_range, "anchor p outside [max(0,tau0), min(1,1+tau0)]");
  }
  p = std::clamp(p, lo, hi);
  const double q = p - tau0;  // control anchor
  bernoulli_joint_profile prof;
  prof.p_plus.reserve(d.treated.size() + 1);
  prof.p_minus.reserve(d.control.size() + 1);
  prof.p_plus.push_back(p);
  prof.p_minus.push_back(q);
  if (dir == direction_t::right) {
    for (double r : d.treated.radii) prof.p_plus.push_back(std::min(p + c.c * r, 1.0));
    for (double r : d.control.radii) prof.p_minus.push_back(std::max(q - c.c * r, 0.0));
  } else {
    for (double r : d.treated.radii) prof.p_plus.push_back(std::max(p - c.c * r, 0.0));
    for (double r : d.control.radii) prof.p_minus.push_back(std::min(q + c.c * r, 1.0));
  }
  return prof;
}

double rejection_prob_exact(const weight_profile& w_plus, const weight_profile& w_minus,
                            const bernoulli_joint_profile& profile, double gamma,
                            comparison_t cmp) {
  if (profile.p_plus.size() != w_plus.size() + 1 ||
      profile.p_minus.size() != w_minus.size() + 1) {
    throw error(errc::length_mismatch, "profile needs n+1 entries per side");
  }
  const enum_table t = build_enum_table(w_plus, w_minus, 22);
  std::vector<double> probs;
  outcome_probs(t, profile, probs);
  double acc = 0.0;
  for (std::size_t idx = 0; idx < t.stats.size(); ++idx) {
    const bool reject = cmp == comparison_t::greater ? t.stats[idx] > gamma
                                                     : t.stats[idx] < gamma;
    if (reject) acc += probs[idx];
  }
  return acc;
}

double rejection_prob_mc(const weight_profile& w_plus, const weight_profile& w_minus,
                         const bernoulli_joint_profile& profile, double gamma,
                         comparison_t cmp, int n_sims, std::uint64_t seed) {
  if (n_sims < 1) throw error(errc::invalid_argument, "n_sims must be >= 1");
  if (profile.p_plus.size() != w_plus.size() + 1 ||
      profile.p_minus.size() != w_minus.size() + 1) {
    throw error(errc::length_mismatch, "profile needs n+1 entries per side");
  }
  const std::vector<double> u = draw_crn(w_plus.size() + w_minus.size(), n_sims, seed);
  std::vector<double> stats;
  mc_statistics(w_plus, w_minus, profile, u, n_sims, stats);
  long hits = 0;
  for (double s : stats) {
    if (cmp == comparison_t::greater ? s > gamma : s < gamma) ++hits;
  }
  return static_cast<double>(hits) / n_sims;
}

double worst_rejection(const design& d, const weight_profile& w_plus,
                       const weight_profile& w_minus, lipschitz_bound c, double tau0,
                       double gamma, direction_t dir, const inference_options& opts) {
  check_tau0(tau0);
  const comparison_t cmp =
      dir == direction_t::right ? comparison_t::greater : comparison_t::less;
  const std::vector<double> anchors = anchor_grid(tau0, opts.anchor_lattice);
  double best = 0.0;
  if (opts.method == calib_method::exact) {
    const enum_table t = build_enum_table(w_plus, w_minus, opts.enum_limit);
    std::vector<double> probs;
    for (double p : anchors) {
      const bernoulli_joint_profile prof = envelope_p_profiles(p, tau0, c, d, dir);
      outcome_probs(t, prof, probs);
      double acc = 0.0;
      for (std::size_t idx = 0; idx < t.stats.size(); ++idx) {
        const bool reject = cmp == comparison_t::greater ? t.stats[idx] > gamma
                                                         : t.stats[idx] < gamma;
        if (reject) acc += probs[idx];
      }
      best = std::max(best, acc);
    }
    return best;
  }
  const std::vector<double> u =
      draw_crn(w_plus.size() + w_minus.size(), opts.n_sims, opts.seed);
  std::vector<double> stats;
  for (double p : anchors) {
    const bernoulli_joint_profile prof = envelope_p_profiles(p, tau0, c, d, dir);
    mc_statistics(w_plus, w_minus, prof, u, opts.n_sims, stats);
    long hits = 0;
    for (double s : stats) {
      if (cmp == comparison_t::greater ? s > gamma : s < gamma) ++hits;
    }
    best = std::max(best, static_cast<double>(hits) / opts.n_sims);
  }
  return best;
}

double critical_value(const design& d, const weight_profile& w_plus,
                      const weight_profile& w_minus, lipschitz_bound c, double tau0,
                      double alpha, direction_t dir, const inference_options& opts) {
  check_tau0(tau0);
  check_alpha(alpha);
  const candidate_set cands = make_candidates(w_plus, w_minus, opts);
  const std::vector<double> anchors = anchor_grid(tau0, opts.anchor_lattice);

  if (opts.method == calib_method::exact) {
    const enum_table t = build_enum_table(w_plus, w_minus, opts.enum_limit);
    std::vector<double> probs;
    double bound = dir == direction_t::right ? -std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::infinity();
    for (double p : anchors) {
      const bernoulli_joint_profile prof = envelope_p_profiles(p, tau0, c, d, dir);
      outcome_probs(t, prof, probs);
      const double g = exact_min_gamma(t, probs, alpha, dir);
      bound = dir == direction_t::right ? std::max(bound, g) : std::min(bound, g);
    }
    return dir == direction_t::right ? snap_up(cands, bound) : snap_down(cands, bound);
  }

  const std::vector<double> u =
      draw_crn(w_plus.size() + w_minus.size(), opts.n_sims, opts.seed);
  const int k_allow = allowed_count(alpha, opts.n_sims);
  std::vector<double> stats;
  double bound = dir == direction_t::right ? -std::numeric_limits<double>::infinity()
                                           : std::numeric_limits<double>::infinity();
  for (double p : anchors) {
    const bernoulli_joint_profile prof = envelope_p_profiles(p, tau0, c, d, dir);
    mc_statistics(w_plus, w_minus, prof, u, opts.n_sims, stats);
    const double v = mc_boundary_stat(stats, k_allow, dir);
    bound = dir == direction_t::right ? std::max(bound, v) : std::min(bound, v);
  }
  return dir == direction_t::right ? snap_up(cands, bound) : snap_down(cands, bound);
}

test_calibration calibrate_test(const design& d, const weight_profile& w_plus,
                                const weight_profile& w_minus, lipschitz_bound c,
                                double tau0, double alpha,
                                const inference_options& opts) {
  test_calibration cal;
  cal.tau0 = tau0;
  cal.alpha = alpha;
  cal.anchor_lattice = opts.anchor_lattice;
  cal.n_sims = opts.n_sims;
  cal.seed = opts.seed;
  cal.method = opts.method;
  cal.gamma_right =
      critical_value(d, w_plus, w_minus, c, tau0, alpha / 2, direction_t::right, opts);
  cal.gamma_left =
      critical_value(d, w_plus, w_minus, c, tau0, alpha / 2, direction_t::left, opts);
  return cal;
}

std::pair<double, double> confidence_interval(const design& d,
                                              const weight_profile& w_plus,
                                              const weight_profile& w_minus,
                                              lipschitz_bound c, double alpha,
                                              const inference_options& opts) {
  check_alpha(alpha);
  const double tau_hat = ate_estimate(d, w_plus, w_minus);
  const double a2 = alpha / 2;

  auto gamma_r = [&](double t) {
    return critical_value(d, w_plus, w_minus, c, t, a2, direction_t::right, opts);
  };
  auto gamma_l = [&](double t) {
    return critical_value(d, w_plus, w_minus, c, t, a2, direction_t::left, opts);
  };

  // Left boundary: smallest tau0 with tau_hat <= gamma_r*(tau0).
  double lower;
  if (tau_hat <= gamma_r(-1.0)) {
    lower = -1.0;
  } else {
    double t = 0.0;
    for (int k = 0; k < opts.bisect_iters; ++k) {
      const double step = std::ldexp(1.0, -k - 1);
      t += (tau_hat > gamma_r(t)) ? step : -step;
    }
    lower = std::clamp(t, -1.0, 1.0);
  }

  // Right boundary: largest tau0 with gamma_l*(tau0) <= tau_hat.
  double upper;
  if (tau_hat >= gamma_l(1.0)) {
    upper = 1.0;
  } else {
    double t = 0.0;
    for (int k = 0; k < opts.bisect_iters; ++k) {
      const double step = std::ldexp(1.0, -k - 1);
      t += (tau_hat < gamma_l(t)) ? -step : step;
    }
    upper = std::clamp(t, -1.0, 1.0);
  }
  if (lower > upper) std::swap(lower, upper);
  return {lower, upper};
}

double max_abs_bias(const design& d, const weight_profile& w_plus,
                    const weight_profile& w_minus, lipschitz_bound c) {
  constexpr int kGrid = 1001;

  // Each side's term is piecewise linear in the anchor, so the grid is
  // augmented with the clipping kinks and evaluated exactly.
  auto side_max = [&](const std::vector<double>& radii, const weight_profile& w,
                      bool treated) {
    std::vector<double> points;
    points.reserve(kGrid + radii.size());
    for (int i = 0; i < kGrid; ++i) points.push_back(static_cast<double>(i) / (kGrid - 1));
    for (double r : radii) {
      const double kink = treated ? 1.0 - c.c * r : c.c * r;
      if (kink > 0.0 && kink < 1.0) points.push_back(kink);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (double a : points) {
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc += treated ? w[i] * std::min(a + c.c * radii[i], 1.0)
                       : w[i] * std::max(a - c.c * radii[i], 0.0);
      }
      best = std::max(best, treated ? acc - a : a - acc);
    }
    return best;
  };

  const double treated_term = side_max(d.treated.radii, w_plus, true);
  const double control_term = side_max(d.control.radii, w_minus, false);
  const double offset =
      0.5 * (w_minus.shrinkage_mass() - w_plus.shrinkage_mass());
  return treated_term + control_term + offset;
}

hoeffding_interval hoeffding_ci(const design& d, const weight_profile& w_plus,
                                const weight_profile& w_minus, lipschitz_bound c,
                                double alpha, sided_t sided) {
  check_alpha(alpha);
  const double tau_hat = ate_estimate(d, w_plus, w_minus);
  double w2 = 0.0;
  for (double w : w_plus.values()) w2 += w * w;
  for (double w : w_minus.values()) w2 += w * w;
  const double bias_bar = max_abs_bias(d, w_plus, w_minus, c);

  hoeffding_interval out;
  if (w2 <= 0.0) {
    out.gamma = bias_bar;
  } else if (sided == sided_t::one) {
    out.gamma = bias_bar + std::sqrt(std::log(1.0 / alpha) * w2 / 2.0);
  } else if (sided == sided_t::two_naive) {
    out.gamma = bias_bar + std::sqrt(std::log(2.0 / alpha) * w2 / 2.0);
  } else {
    const double naive = bias_bar + std::sqrt(std::log(2.0 / alpha) * w2 / 2.0);
    auto pi_bar = [&](double gamma) {
      // max over b in [0, bias_bar] of the two-tail bound; 401-point grid
      // plus golden-section refinement around the grid argmax.
      auto f = [&](double b) {
        return std::exp(-2.0 * (gamma - b) * (gamma - b) / w2) +
               std::exp(-2.0 * (gamma + b) * (gamma + b) / w2);
      };
      if (bias_bar <= 0.0) return f(0.0);
      constexpr int m = 401;
      double best = -1.0, barg = 0.0;
      for (int i = 0; i < m; ++i) {
        const double b = bias_bar * i / (m - 1);
        const double v = f(b);
        if (v > best) {
          best = v;
          barg = b;
        }
      }
      const double h = bias_bar / (m - 1);
      double lo = std::max(0.0, barg - h), hi = std::min(bias_bar, barg + h);
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 60; ++it) {
        const double x1 = hi - gr * (hi - lo);
        const double x2 = lo + gr * (hi - lo);
        if (f(x1) < f(x2)) {
          lo = x1;
        } else {
          hi = x2;
        }
      }
      return std::max(best, f(0.5 * (lo + hi)));
    };
    double lo = bias_bar, hi = naive;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (pi_bar(mid) <= alpha ? hi : lo) = mid;
    }
    out.gamma = hi;
  }

  if (sided == sided_t::one) {
    out.lower = std::max(-1.0, tau_hat - out.gamma);
    out.upper = 1.0;
  } else {
    out.lower = std::max(-1.0, tau_hat - out.gamma);
    out.upper = std::min(1.0, tau_hat + out.gamma);
  }
  return out;
}

critical_curves calibrate_critical_curves(const design& d, const weight_profile& w_plus,
                                          const weight_profile& w_minus,
                                          lipschitz_bound c, double alpha,
                                          const inference_options& opts) {
  check_alpha(alpha);
  if (opts.method == calib_method::exact) {
    throw error(errc::invalid_argument, "curve calibration is Monte Carlo only");
  }
  const int L = opts.anchor_lattice;
  const int S = opts.n_sims;
  const std::size_t np = w_plus.size(), nm = w_minus.size();
  const std::vector<double> u = draw_crn(np + nm, S, opts.seed);
  const candidate_set cands = make_candidates(w_plus, w_minus, opts);
  const int k_allow = allowed_count(alpha / 2, S);

  // Per-side statistic samples at every lattice anchor parameter, for the
  // upper and lower envelope of each side. The two-sided statistic at anchor
  // q for hypothesis tau0 = sh/L is then a columnwise difference.
  auto side_stats = [&](bool treated, bool upper) {
    std::vector<std::vector<double>> cols(L + 1, std::vector<double>(S, 0.0));
    const auto& radii = treated ? d.treated.radii : d.control.radii;
    const weight_profile& w = treated ? w_plus : w_minus;
    const std::size_t offset = treated ? 0 : np;
    const std::size_t n_all = np + nm;
    for (int k = 0; k <= L; ++k) {
      const double q = static_cast<double>(k) / L;
      std::vector<double> p(radii.size());
      for (std::size_t i = 0; i < radii.size(); ++i) {
        p[i] = upper ? std::min(q + c.c * radii[i], 1.0)
                     : std::max(q - c.c * radii[i], 0.0);
      }
      std::vector<double>& col = cols[k];
      for (int s = 0; s < S; ++s) {
        const double* us = u.data() + static_cast<std::size_t>(s) * n_all + offset;
        double acc = 0.0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
          acc += w[i] * ((us[i] < p[i] ? 1.0 : 0.0) - 0.5);
        }
        col[s] = acc;
      }
    }
    return cols;
  };
  const auto a_up = side_stats(true, true);
  const auto a_lo = side_stats(true, false);
  const auto b_up = side_stats(false, true);
  const auto b_lo = side_stats(false, false);

  critical_curves curves;
  curves.lattice = L;
  curves.tau0s.reserve(2 * L + 1);
  curves.gamma_right.reserve(2 * L + 1);
  curves.gamma_left.reserve(2 * L + 1);
  std::vector<double> stats(S);
  for (int sh = -L; sh <= L; ++sh) {
    const int klo = std::max(0, sh), khi = std::min(L, L + sh);
    double vmax = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (int k = klo; k <= khi; ++k) {
      const std::vector<double>& au = a_up[k];
      const std::vector<double>& bl = b_lo[k - sh];
      for (int s = 0; s < S; ++s) stats[s] = au[s] - bl[s];
      vmax = std::max(vmax, mc_boundary_stat(stats, k_allow, direction_t::right));
      const std::vector<double>& al = a_lo[k];
      const std::vector<double>& bu = b_up[k - sh];
      for (int s = 0; s < S; ++s) stats[s] = al[s] - bu[s];
      vmin = std::min(vmin, mc_boundary_stat(stats, k_allow, direction_t::left));
    }
    curves.tau0s.push_back(static_cast<double>(sh) / L);
    curves.gamma_right.push_back(snap_up(cands, vmax));
    curves.gamma_left.push_back(snap_down(cands, vmin));
  }
  return curves;
}

std::pair<double, double> invert_critical_curves(const critical_curves& curves,
                                                 double tau_hat) {
  const std::size_t n = curves.tau0s.size();
  std::size_t lo = n, hi = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (curves.gamma_left[i] <= tau_hat && tau_hat <= curves.gamma_right[i]) {
      if (lo == n) lo = i;
      hi = i;
    }
  }
  if (lo == n) {
    return {std::numeric_limits<double>::quiet_NaN(),
            std::numeric_limits<double>::quiet_NaN()};
  }
  return {curves.tau0s[lo], curves.tau0s[hi]};
}

}  // namespace rdb
