#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace rdbtest {

// Deterministic draws for property tests.
class draw {
 public:
  explicit draw(std::uint64_t seed) : rng_(seed, 99), counter_(0) {}

  double uniform() { return rng_.uniform(0, counter_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
  }
  template <typename T>
  T pick(std::initializer_list<T> items) {
    const int k = uniform_int(0, static_cast<int>(items.size()) - 1);
    return *(items.begin() + k);
  }

  std::vector<double> sorted_radii(int n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> r(n);
    for (double& x : r) x = uniform(lo, hi);
    std::sort(r.begin(), r.end());
    return r;
  }

  // Random point of the shrinkage class W (sum <= 1, nonnegative).
  std::vector<double> weights_in_w(int n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (double& x : w) {
      x = uniform();
      s += x;
    }
    if (s > 1.0) {
      const double scale = uniform() / s;
      for (double& x : w) x *= scale;
    }
    return w;
  }

  // Random monotone-nonincreasing point of W.
  std::vector<double> weights_in_w1(int n) {
    std::vector<double> w = weights_in_w(n);
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
  }

  // Random C-Lipschitz radial mean path theta(r) with theta_0 = anchor and
  // theta_i >= theta_0 (the region the envelope argument covers).
  std::vector<double> feasible_theta(const std::vector<double>& radii, double c,
                                     double anchor) {
    std::vector<double> th(radii.size() + 1);
    th[0] = anchor;
    double prev_r = 0.0, prev_v = anchor;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double slope = uniform(-c, c);
      double v = prev_v + slope * (radii[i] - prev_r);
      v = std::clamp(v, -0.5, 0.5);
      prev_v = v;
      prev_r = radii[i];
      th[i + 1] = std::max(v, anchor);
    }
    return th;
  }

 private:
  rdb::counter_rng rng_;
  std::uint64_t counter_;
};

}  // namespace rdbtest
