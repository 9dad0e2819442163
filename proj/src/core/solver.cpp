#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rng.hpp"
#include "worst_case.hpp"

namespace rdb {

namespace {

// L2 projection onto nonincreasing vectors (pool adjacent violators).
void pava_nonincreasing(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> vals;
  std::vector<std::size_t> counts;
  vals.reserve(n);
  counts.reserve(n);
  for (double x : v) {
    vals.push_back(x);
    counts.push_back(1);
    while (vals.size() > 1 && vals[vals.size() - 2] < vals.back()) {
      const double merged = (vals[vals.size() - 2] * counts[counts.size() - 2] +
                             vals.back() * counts.back()) /
                            (counts[counts.size() - 2] + counts.back());
      counts[counts.size() - 2] += counts.back();
      vals[vals.size() - 2] = merged;
      vals.pop_back();
      counts.pop_back();
    }
  }
  std::size_t i = 0;
  for (std::size_t b = 0; b < vals.size(); ++b) {
    for (std::size_t k = 0; k < counts[b]; ++k) v[i++] = vals[b];
  }
}

// Feasibility map for W1: monotone nonincreasing, nonnegative, sum <= 1.
// PAVA, clip at zero, then shift-and-clip the excess mass (which preserves
// the monotone shape, unlike rescaling).
void project_w1(std::vector<double>& v) {
  pava_nonincreasing(v);
  for (double& x : v) x = std::max(x, 0.0);
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s <= 1.0) return;
  double lo = 0.0, hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 100; ++it) {
    const double lam = 0.5 * (lo + hi);
    double t = 0.0;
    for (double x : v) t += std::max(x - lam, 0.0);
    (t > 1.0 ? lo : hi) = lam;
  }
  const double lam = 0.5 * (lo + hi);
  for (double& x : v) x = std::max(x - lam, 0.0);
}

void project_simplex(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, lam = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    css += u[i];
    const double cand = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - cand > 0.0) lam = cand;
  }
  for (double& x : v) x = std::max(x - lam, 0.0);
}

double gbar_value(const std::vector<double>& w, lipschitz_bound c,
                  std::span<const double> radii) {
  return gbar_closed(weight_profile(w, radii, false), c, radii).value;
}

// Coordinate-wise golden-section passes inside the feasible box implied by
// the neighbors and the sum cap. Tightens the subgradient solution near
// kinks of the piecewise-smooth objective. Never accepts a worse point.
template <typename Objective>
int coordinate_polish(std::vector<double>& w, double sum_cap, Objective&& f,
                      int passes, double min_width = 1e-13) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  int evals = 0;
  for (int pass = 0; pass < passes; ++pass) {
    double moved = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double sum_others =
          std::accumulate(w.begin(), w.end(), 0.0) - w[i];
      const double lo = (i + 1 < w.size()) ? w[i + 1] : 0.0;
      double hi = (i > 0) ? w[i - 1] : 1.0;
      hi = std::min(hi, sum_cap - sum_others);
      if (hi <= lo + min_width) continue;
      const double old = w[i];
      auto eval_at = [&](double x) {
        w[i] = x;
        ++evals;
        return f(w);
      };
      double best_x = old, best_v = eval_at(old);
      auto track = [&](double x) {
        const double v = eval_at(x);
        if (v < best_v) {
          best_v = v;
          best_x = x;
        }
        return v;
      };
      double a = lo, b = hi;
      for (int it = 0; it < 80 && b - a > min_width; ++it) {
        const double x1 = b - gr * (b - a);
        const double x2 = a + gr * (b - a);
        if (track(x1) < track(x2)) {
          b = x2;
        } else {
          a = x1;
        }
      }
      w[i] = best_x;
      moved = std::max(moved, std::abs(best_x - old));
    }
    if (moved < 1e-12) break;
  }
  return evals;
}

}  // namespace

solve_result solve_minimax_weights(std::span<const double> radii, lipschitz_bound c,
                                   const solver_options& opts) {
  const std::size_t n = radii.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (radii[i] < radii[i - 1]) {
      throw error(errc::invalid_argument, "radii must be sorted nondecreasing");
    }
  }
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw error(errc::invalid_argument, "invalid solver options");
  }

  // Exact exclusion: w_i = 0 wherever C r_i >= 1/2 (a suffix of the sorted radii).
  std::size_t m = 0;
  while (m < n && c.c * radii[m] < 0.5) ++m;
  const std::span<const double> rf = radii.subspan(0, m);

  solve_result res;
  if (m < n) res.active_constraints.push_back("excluded:" + std::to_string(n - m));
  if (m == 0) {
    res.weights = weight_profile(std::vector<double>(n, 0.0), radii);
    res.value = 0.25;
    return res;
  }

  auto objective = [&](const std::vector<double>& w) { return gbar_value(w, c, rf); };

  counter_rng jitter(opts.seed, /*domain=*/3);
  std::vector<double> best_w;
  double best_v = std::numeric_limits<double>::infinity();
  int iterations = 0;

  for (int rs = 0; rs < std::max(1, opts.restarts); ++rs) {
    std::vector<double> w(m);
    if (rs == 0) {
      std::fill(w.begin(), w.end(), std::min(1.0 / static_cast<double>(m), 0.5));
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        w[i] = jitter.uniform(static_cast<std::uint64_t>(rs), i);
      }
      std::sort(w.begin(), w.end(), std::greater<>());
      project_w1(w);
    }

    double step0 = 1.0;
    double v = objective(w);
    bool converged = false;
    for (int it = 0; it < opts.max_iter && !converged; ++it) {
      const worst_case_report rep =
          gbar_closed(weight_profile(w, rf, false), c, rf);
      std::vector<double> grad(m);
      double bias = -rep.anchor;
      std::vector<double> th(m);
      for (std::size_t i = 0; i < m; ++i) {
        th[i] = std::min(rep.anchor + c.c * rf[i], 0.5);
        bias += w[i] * th[i];
      }
      for (std::size_t i = 0; i < m; ++i) {
        grad[i] = 2.0 * bias * th[i] + 2.0 * w[i] * (0.25 - th[i] * th[i]);
      }

      double step = step0;
      bool improved = false;
      std::vector<double> cand(m);
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t i = 0; i < m; ++i) cand[i] = w[i] - step * grad[i];
        project_w1(cand);
        const double vc = objective(cand);
        if (vc < v) {
          const double dv = v - vc;
          w = cand;
          v = vc;
          improved = true;
          step0 = std::min(step * 4.0, 1e3);
          ++iterations;
          converged = dv <= opts.tol * 1e-4 * (1.0 + std::abs(v));
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }

    iterations += coordinate_polish(w, 1.0, objective, 6);
    const double vc = objective(w);
    if (vc < best_v - 1e-15 ||
        (std::abs(vc - best_v) <= 1e-15 &&
         std::lexicographical_compare(w.begin(), w.end(), best_w.begin(), best_w.end()))) {
      best_v = vc;
      best_w = w;
    }
  }

  std::vector<double> full(n, 0.0);
  std::copy(best_w.begin(), best_w.end(), full.begin());
  const double mass = std::accumulate(full.begin(), full.end(), 0.0);
  if (mass >= 1.0 - 1e-10) res.active_constraints.push_back("sum_at_cap");
  res.weights = weight_profile(std::move(full), radii);
  res.value = gbar_closed(res.weights, c, radii).value;
  res.iterations = iterations;
  return res;
}

solve_result solve_gaussian_weights(std::span<const double> radii, lipschitz_bound c,
                                    std::span<const double> sigma2,
                                    const solver_options& opts) {
  const std::size_t n = radii.size();
  if (n == 0) throw error(errc::empty_side, "Gaussian weights need n >= 1");
  std::vector<double> s2(n, 0.25);
  if (!sigma2.empty()) {
    if (sigma2.size() != n) {
      throw error(errc::length_mismatch, "sigma2/radii length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(sigma2[i] > 0.0)) {
        throw error(errc::negative_variance, "sigma2 must be > 0");
      }
      s2[i] = sigma2[i];
    }
  }

  const double c2 = c.c * c.c;
  auto value = [&](const std::vector<double>& w) {
    double wr = 0.0, q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wr += w[i] * radii[i];
      q += w[i] * w[i] * s2[i];
    }
    return c2 * wr * wr + q;
  };

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double rr = 0.0, smax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rr += radii[i] * radii[i];
    smax = std::max(smax, s2[i]);
  }
  const double lip = 2.0 * (c2 * rr + smax);

  int iterations = 0;
  std::vector<double> g(n), trial(n), dir(n);
  for (int it = 0; it < opts.max_iter; ++it) {
    double wr = 0.0;
    for (std::size_t i = 0; i < n; ++i) wr += w[i] * radii[i];
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = 2.0 * c2 * wr * radii[i] + 2.0 * s2[i] * w[i];
    }
    for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] - g[i] / lip;
    project_simplex(trial);
    double dr = 0.0, d_quad = 0.0, d_dot_g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = trial[i] - w[i];
      dr += dir[i] * radii[i];
      d_quad += dir[i] * dir[i] * s2[i];
      d_dot_g += dir[i] * g[i];
    }
    const double curv = c2 * dr * dr + d_quad;  // d'A d
    double alpha = 1.0;
    if (curv > 0.0) alpha = std::clamp(-d_dot_g / (2.0 * curv), 0.0, 1.0);
    double max_move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double nw = w[i] + alpha * dir[i];
      max_move = std::max(max_move, std::abs(nw - w[i]));
      w[i] = nw;
    }
    ++iterations;
    if (max_move < 1e-15) break;
  }
  project_simplex(w);

  solve_result res;
  res.weights = weight_profile(w, radii);
  res.value = value(w);
  res.iterations = iterations;
  res.active_constraints.push_back("simplex");
  return res;
}

std::pair<solve_result, solve_result> solve_ate_weights(const design& d,
                                                        lipschitz_bound c,
                                                        const solver_options& opts) {
  const std::span<const double> rp(d.treated.radii);
  const std::span<const double> rm(d.control.radii);
  std::size_t mp = 0, mm = 0;
  while (mp < rp.size() && c.c * rp[mp] < 0.5) ++mp;
  while (mm < rm.size() && c.c * rm[mm] < 0.5) ++mm;
  const auto rfp = rp.subspan(0, mp);
  const auto rfm = rm.subspan(0, mm);

  design free_design;
  free_design.treated = side_sample(std::vector<double>(rfp.begin(), rfp.end()),
                                    std::vector<double>(rfp.size(), 0.0));
  free_design.control = side_sample(std::vector<double>(rfm.begin(), rfm.end()),
                                    std::vector<double>(rfm.size(), 0.0));

  auto eval = [&](const std::vector<double>& wp, const std::vector<double>& wm,
                  int grid_m) {
    return ate_worst_case_mse(weight_profile(wp, rfp, false),
                              weight_profile(wm, rfm, false), c, free_design, grid_m);
  };

  counter_rng jitter(opts.seed, /*domain=*/4);
  std::vector<double> best_wp, best_wm;
  double best_v = std::numeric_limits<double>::infinity();
  int iterations = 0;

  for (int rs = 0; rs < std::max(1, opts.restarts); ++rs) {
    std::vector<double> wp(mp), wm(mm);
    if (rs == 0) {
      std::fill(wp.begin(), wp.end(), mp ? std::min(1.0 / mp, 0.5) : 0.0);
      std::fill(wm.begin(), wm.end(), mm ? std::min(1.0 / mm, 0.5) : 0.0);
    } else {
      for (std::size_t i = 0; i < mp; ++i) wp[i] = jitter.uniform(2 * rs, i);
      for (std::size_t i = 0; i < mm; ++i) wm[i] = jitter.uniform(2 * rs + 1, i);
      std::sort(wp.begin(), wp.end(), std::greater<>());
      std::sort(wm.begin(), wm.end(), std::greater<>());
      project_w1(wp);
      project_w1(wm);
    }

    double v = eval(wp, wm, 41).value;
    double step0 = 1.0;
    bool converged = false;
    for (int it = 0; it < opts.max_iter && !converged; ++it) {
      const worst_case_report rep = eval(wp, wm, 41);
      const double tp = rep.anchor, tm = rep.anchor_minus;
      double b_plus = -tp, b_minus = -tm;
      std::vector<double> thp(mp), thm(mm);
      for (std::size_t i = 0; i < mp; ++i) {
        thp[i] = std::min(tp + c.c * rfp[i], 0.5);
        b_plus += wp[i] * thp[i];
      }
      for (std::size_t i = 0; i < mm; ++i) {
        thm[i] = std::max(tm - c.c * rfm[i], -0.5);
        b_minus += wm[i] * thm[i];
      }
      std::vector<double> gp(mp), gm(mm);
      for (std::size_t i = 0; i < mp; ++i) {
        gp[i] = 2.0 * (b_plus - b_minus) * thp[i] + 2.0 * wp[i] * (0.25 - thp[i] * thp[i]);
      }
      for (std::size_t i = 0; i < mm; ++i) {
        gm[i] = -2.0 * (b_plus - b_minus) * thm[i] + 2.0 * wm[i] * (0.25 - thm[i] * thm[i]);
      }

      double step = step0;
      bool improved = false;
      std::vector<double> cp(mp), cm(mm);
      for (int bt = 0; bt < 50; ++bt) {
        for (std::size_t i = 0; i < mp; ++i) cp[i] = wp[i] - step * gp[i];
        for (std::size_t i = 0; i < mm; ++i) cm[i] = wm[i] - step * gm[i];
        project_w1(cp);
        project_w1(cm);
        const double vc = eval(cp, cm, 41).value;
        if (vc < v) {
          const double dv = v - vc;
          wp = cp;
          wm = cm;
          v = vc;
          improved = true;
          step0 = std::min(step * 4.0, 1e3);
          ++iterations;
          converged = dv <= opts.tol * 1e-2 * (1.0 + std::abs(v));
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }

    // Polish each side holding the other fixed.
    auto obj_p = [&](const std::vector<double>& x) { return eval(x, wm, 41).value; };
    auto obj_m = [&](const std::vector<double>& x) { return eval(wp, x, 41).value; };
    for (int round = 0; round < 2; ++round) {
      iterations += coordinate_polish(wp, 1.0, obj_p, 2);
      iterations += coordinate_polish(wm, 1.0, obj_m, 2);
    }

    const double vc = eval(wp, wm, 101).value;
    if (vc < best_v) {
      best_v = vc;
      best_wp = wp;
      best_wm = wm;
    }
  }

  auto expand = [](const std::vector<double>& w, std::size_t full_n,
                   std::span<const double> full_r) {
    std::vector<double> out(full_n, 0.0);
    std::copy(w.begin(), w.end(), out.begin());
    return weight_profile(std::move(out), full_r);
  };
  solve_result res_p, res_m;
  res_p.weights = expand(best_wp, rp.size(), rp);
  res_m.weights = expand(best_wm, rm.size(), rm);
  if (mp < rp.size()) res_p.active_constraints.push_back("excluded:" + std::to_string(rp.size() - mp));
  if (mm < rm.size()) res_m.active_constraints.push_back("excluded:" + std::to_string(rm.size() - mm));
  const double certified =
      ate_worst_case_mse(res_p.weights, res_m.weights, c, d).value;
  res_p.value = certified;
  res_m.value = certified;
  res_p.iterations = iterations;
  res_m.iterations = iterations;
  return {res_p, res_m};
}

}  // namespace rdb
