#include "worst_case.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace rdb {

namespace {

constexpr double kDegenerate = 1e-14;

struct quad {
  double a = 0.0, b = 0.0, d = 0.0;  // a t^2 + b t + d
  double at(double t) const { return (a * t + b) * t + d; }
};

// Quadratic coefficients of mse_binary(w, envelope(t)) on an anchor interval
// where exactly the observations with C r_i > 1/2 - t are clipped at 1/2.
// Clipped observations contribute w_i/2 to the bias sum and zero variance.
quad piece_coeffs(std::span<const double> w, double c, std::span<const double> radii,
                  double t_probe) {
  double u_f = 0.0, k_f = 0.0, s2_f = 0.0, sr_f = 0.0, swr2 = 0.0, s_cl = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (t_probe + c * radii[i] > 0.5) {
      s_cl += w[i];
    } else {
      u_f += w[i];
      k_f += w[i] * radii[i];
      s2_f += w[i] * w[i];
      sr_f += w[i] * w[i] * radii[i];
      swr2 += w[i] * w[i] * radii[i] * radii[i];
    }
  }
  quad q;
  const double bias0 = c * k_f + 0.5 * s_cl;  // bias(t) = (u_f - 1) t + bias0
  q.a = (u_f - 1.0) * (u_f - 1.0) - s2_f;
  q.b = 2.0 * (u_f - 1.0) * bias0 - 2.0 * c * sr_f;
  q.d = bias0 * bias0 + 0.25 * s2_f - c * c * swr2;
  return q;
}

}  // namespace

mean_profile envelope_theta(double t, lipschitz_bound c, std::span<const double> radii) {
  if (!(t >= -0.5 && t <= 0.5)) {
    throw error(errc::anchor_out_of_range, "anchor must lie in [-1/2,1/2]");
  }
  std::vector<double> v;
  v.reserve(radii.size() + 1);
  v.push_back(t);
  for (double r : radii) v.push_back(std::min(t + c.c * r, 0.5));
  return mean_profile(std::move(v), mean_profile::repr_t::theta);
}

double mse_binary(const weight_profile& w, const mean_profile& theta) {
  const mean_profile th = theta.as_theta();
  if (th.values.size() != w.size() + 1) {
    throw error(errc::length_mismatch, "profile needs n+1 entries");
  }
  double bias = -th.values[0];
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = th.values[i + 1];
    bias += w[i] * t;
    var += w[i] * w[i] * (0.25 - t * t);
  }
  return bias * bias + var;
}

double mse_gauss(const weight_profile& w, const mean_profile& theta,
                 std::span<const double> sigma2) {
  const mean_profile th = theta.as_theta();
  if (th.values.size() != w.size() + 1 || sigma2.size() != w.size()) {
    throw error(errc::length_mismatch, "profile/sigma2 length mismatch");
  }
  double bias = -th.values[0];
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(sigma2[i] >= 0.0)) {
      throw error(errc::negative_variance, "sigma2 must be >= 0");
    }
    bias += w[i] * th.values[i + 1];
    var += w[i] * w[i] * sigma2[i];
  }
  return bias * bias + var;
}

worst_case_report gbar_closed(const weight_profile& w, lipschitz_bound c,
                              std::span<const double> radii) {
  if (w.size() != radii.size()) {
    throw error(errc::length_mismatch, "weights/radii length mismatch");
  }
  worst_case_report rep;
  rep.method = worst_case_report::method_t::closed_form;
  if (w.size() == 0) {
    rep.value = 0.25;
    rep.anchor = -0.5;
    return rep;
  }

  // Anchor intervals between consecutive clipping kinks 1/2 - C r_i.
  std::set<double> cuts{-0.5, 0.0};
  for (double r : radii) {
    const double k = 0.5 - c.c * r;
    if (k > -0.5 && k < 0.0) cuts.insert(k);
  }
  std::vector<double> bounds(cuts.begin(), cuts.end());

  double best = -1.0, best_t = -0.5;
  auto consider = [&](const quad& q, double t) {
    const double v = q.at(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  };
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const double lo = bounds[p], hi = bounds[p + 1];
    const quad q = piece_coeffs(w.values(), c.c, radii, 0.5 * (lo + hi));
    consider(q, lo);
    consider(q, hi);
    // Interior stationary point; with a degenerate quadratic the endpoint
    // branch (theta_0 = -1/2 on the leftmost piece) already covers it.
    if (q.a < -kDegenerate) {
      const double v = -q.b / (2.0 * q.a);
      if (v > lo && v < hi) consider(q, v);
    }
  }
  rep.value = best;
  rep.anchor = best_t;
  return rep;
}

worst_case_report gbar_grid(const weight_profile& w, lipschitz_bound c,
                            std::span<const double> radii, int m) {
  if (m < 2) throw error(errc::invalid_argument, "grid needs at least 2 anchors");
  worst_case_report rep;
  rep.method = worst_case_report::method_t::grid;
  double best = -1.0, best_t = -0.5;
  for (int i = 0; i < m; ++i) {
    const double t = -0.5 + 0.5 * static_cast<double>(i) / (m - 1);
    const double v = mse_binary(w, envelope_theta(t, c, radii));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  rep.value = best;
  rep.anchor = best_t;
  return rep;
}

worst_case_report worst_case_mse_brute(const weight_profile& w, lipschitz_bound c,
                                       std::span<const double> radii, double step) {
  const std::size_t n = w.size();
  if (n > 4) throw error(errc::too_large, "brute-force oracle requires n <= 4");
  if (!(step > 0.0 && step <= 0.25)) {
    throw error(errc::invalid_argument, "step must lie in (0, 0.25]");
  }
  const int m = static_cast<int>(std::lround(1.0 / step)) + 1;
  std::vector<double> grid(m);
  for (int i = 0; i < m; ++i) grid[i] = -0.5 + static_cast<double>(i) / (m - 1);

  std::vector<double> dist0(n + 1, 0.0);  // radius per profile entry
  for (std::size_t i = 0; i < n; ++i) dist0[i + 1] = radii[i];

  std::vector<double> theta(n + 1);
  double best = -1.0, best_t = -0.5;
  auto rec = [&](auto&& self, std::size_t d) -> void {
    if (d == n + 1) {
      double bias = -theta[0], var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        bias += w[i] * theta[i + 1];
        var += w[i] * w[i] * (0.25 - theta[i + 1] * theta[i + 1]);
      }
      const double v = bias * bias + var;
      if (v > best) {
        best = v;
        best_t = theta[0];
      }
      return;
    }
    for (double g : grid) {
      bool ok = true;
      for (std::size_t j = 0; j < d; ++j) {
        if (std::abs(g - theta[j]) > c.c * std::abs(dist0[d] - dist0[j]) + 1e-12) {
          ok = false;
          break;
        }
      }
      if (ok) {
        theta[d] = g;
        self(self, d + 1);
      }
    }
  };
  rec(rec, 0);

  worst_case_report rep;
  rep.method = worst_case_report::method_t::brute;
  rep.value = best;
  rep.anchor = best_t;
  return rep;
}

double ate_mse_at(const weight_profile& w_plus, const weight_profile& w_minus,
                  lipschitz_bound c, std::span<const double> radii_plus,
                  std::span<const double> radii_minus, double t_plus, double t_minus) {
  double b_plus = -t_plus, v_plus = 0.0;
  for (std::size_t i = 0; i < w_plus.size(); ++i) {
    const double th = std::min(t_plus + c.c * radii_plus[i], 0.5);
    b_plus += w_plus[i] * th;
    v_plus += w_plus[i] * w_plus[i] * (0.25 - th * th);
  }
  double b_minus = -t_minus, v_minus = 0.0;
  for (std::size_t i = 0; i < w_minus.size(); ++i) {
    const double th = std::max(t_minus - c.c * radii_minus[i], -0.5);
    b_minus += w_minus[i] * th;
    v_minus += w_minus[i] * w_minus[i] * (0.25 - th * th);
  }
  return b_plus * b_plus + v_plus + b_minus * b_minus + v_minus -
         2.0 * b_plus * b_minus;
}

worst_case_report ate_worst_case_mse(const weight_profile& w_plus,
                                     const weight_profile& w_minus,
                                     lipschitz_bound c, const design& d, int grid_m) {
  if (w_plus.size() != d.treated.size() || w_minus.size() != d.control.size()) {
    throw error(errc::length_mismatch, "design/weights length mismatch");
  }
  if (grid_m < 2) throw error(errc::invalid_argument, "grid needs at least 2 anchors");
  const std::span<const double> rp(d.treated.radii);
  const std::span<const double> rm(d.control.radii);

  auto f = [&](double tp, double tm) {
    return ate_mse_at(w_plus, w_minus, c, rp, rm, tp, tm);
  };

  double best = -1.0, bp = -0.5, bm = 0.5;
  for (int i = 0; i < grid_m; ++i) {
    const double tp = -0.5 + 0.5 * static_cast<double>(i) / (grid_m - 1);
    for (int j = 0; j < grid_m; ++j) {
      const double tm = 0.5 * static_cast<double>(j) / (grid_m - 1);
      const double v = f(tp, tm);
      if (v > best) {
        best = v;
        bp = tp;
        bm = tm;
      }
    }
  }

  // One golden-section pass per coordinate around the grid argmax.
  const double h = 0.5 / (grid_m - 1);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto refine = [&](double x, double lo_cap, double hi_cap, auto&& eval) {
    double lo = std::max(lo_cap, x - h), hi = std::min(hi_cap, x + h);
    for (int it = 0; it < 60; ++it) {
      const double a = hi - gr * (hi - lo);
      const double b = lo + gr * (hi - lo);
      if (eval(a) < eval(b)) {
        lo = a;
      } else {
        hi = b;
      }
    }
    return 0.5 * (lo + hi);
  };
  const double rp_ref = refine(bp, -0.5, 0.0, [&](double t) { return f(t, bm); });
  const double rm_ref = refine(bm, 0.0, 0.5, [&](double t) { return f(rp_ref, t); });
  worst_case_report rep;
  rep.method = worst_case_report::method_t::grid;
  rep.value = best;
  rep.anchor = bp;
  rep.anchor_minus = bm;
  if (const double refined = f(rp_ref, rm_ref); refined > best) {
    rep.value = refined;
    rep.anchor = rp_ref;
    rep.anchor_minus = rm_ref;
  }
  return rep;
}

}  // namespace rdb
