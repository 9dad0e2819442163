#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rdb {

namespace {

constexpr double kTol = 1e-12;

void check_outcomes(const std::vector<double>& y) {
  for (double v : y) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw error(errc::out_of_range_outcome,
                  "outcome " + std::to_string(v) + " outside [0,1]");
    }
  }
}

}  // namespace

side_sample::side_sample(std::vector<double> r, std::vector<double> y)
    : radii(std::move(r)), outcomes(std::move(y)) {
  if (radii.size() != outcomes.size()) {
    throw error(errc::length_mismatch, "radii/outcomes length mismatch");
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 0.0) || !std::isfinite(radii[i])) {
      throw error(errc::invalid_argument, "radius must be finite and >= 0");
    }
    if (i > 0 && radii[i] < radii[i - 1]) {
      throw error(errc::invalid_argument, "radii must be sorted nondecreasing");
    }
  }
  check_outcomes(outcomes);
  binary = std::all_of(outcomes.begin(), outcomes.end(),
                       [](double v) { return v == 0.0 || v == 1.0; });
}

lipschitz_bound::lipschitz_bound(double value) : c(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw error(errc::invalid_argument, "Lipschitz constant must be finite and >= 0");
  }
}

weight_profile::weight_profile(std::vector<double> w, std::span<const double> radii,
                               bool shrinkage)
    : w_(std::move(w)) {
  if (w_.size() != radii.size()) {
    throw error(errc::length_mismatch, "weights/radii length mismatch");
  }
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!(w_[i] >= 0.0) || !std::isfinite(w_[i])) {
      throw error(errc::invalid_argument, "weights must be finite and >= 0");
    }
    u_ += w_[i];
    k_ += w_[i] * radii[i];
  }
  if (shrinkage && u_ > 1.0 + kTol) {
    throw error(errc::invalid_argument,
                "shrinkage weights must satisfy sum(w) <= 1, got " + std::to_string(u_));
  }
}

mean_profile::mean_profile(std::vector<double> v, repr_t r) : values(std::move(v)), repr(r) {
  const double lo = repr == repr_t::theta ? -0.5 : 0.0;
  const double hi = repr == repr_t::theta ? 0.5 : 1.0;
  for (double x : values) {
    if (!(x >= lo - kTol && x <= hi + kTol)) {
      throw error(errc::out_of_range_outcome, "mean profile value outside range");
    }
  }
}

mean_profile mean_profile::as_theta() const {
  if (repr == repr_t::theta) return *this;
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values[i] - 0.5;
  return mean_profile(std::move(v), repr_t::theta);
}

mean_profile mean_profile::as_p() const {
  if (repr == repr_t::p) return *this;
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values[i] + 0.5;
  return mean_profile(std::move(v), repr_t::p);
}

bool mean_profile::lipschitz_feasible(std::span<const double> radii,
                                      lipschitz_bound c) const {
  if (values.size() != radii.size() + 1) {
    throw error(errc::length_mismatch, "profile needs n+1 entries");
  }
  auto radius = [&](std::size_t i) { return i == 0 ? 0.0 : radii[i - 1]; };
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (std::abs(values[i] - values[j]) >
          c.c * std::abs(radius(i) - radius(j)) + kTol) {
        return false;
      }
    }
  }
  return true;
}

design normalize_design(std::span<const point> points, double cutoff) {
  std::vector<point> treated, control;
  for (const point& pt : points) {
    if (!(pt.y >= 0.0 && pt.y <= 1.0)) {
      throw error(errc::out_of_range_outcome,
                  "outcome " + std::to_string(pt.y) + " outside [0,1]");
    }
    if (pt.r >= cutoff) {
      treated.push_back({pt.r - cutoff, pt.y});
    } else {
      control.push_back({cutoff - pt.r, pt.y});
    }
  }
  if (treated.empty() || control.empty()) {
    throw error(errc::empty_side, treated.empty() ? "no observations with r >= cutoff"
                                                  : "no observations with r < cutoff");
  }
  auto build = [](std::vector<point>& side) {
    std::stable_sort(side.begin(), side.end(),
                     [](const point& a, const point& b) { return a.r < b.r; });
    std::vector<double> r(side.size()), y(side.size());
    for (std::size_t i = 0; i < side.size(); ++i) {
      r[i] = side[i].r;
      y[i] = side[i].y;
    }
    return side_sample(std::move(r), std::move(y));
  };
  design d;
  d.treated = build(treated);
  d.control = build(control);
  d.cutoff = cutoff;
  return d;
}

double shrinkage_estimate(const side_sample& sample, const weight_profile& weights) {
  if (sample.size() != weights.size()) {
    throw error(errc::length_mismatch, "sample/weights length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] * (sample.outcomes[i] - 0.5);
  }
  return 0.5 + acc;
}

double ate_estimate(const design& d, const weight_profile& w_plus,
                    const weight_profile& w_minus) {
  if (d.treated.size() != w_plus.size() || d.control.size() != w_minus.size()) {
    throw error(errc::length_mismatch, "design/weights length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w_plus.size(); ++i) {
    acc += w_plus[i] * (d.treated.outcomes[i] - 0.5);
  }
  for (std::size_t i = 0; i < w_minus.size(); ++i) {
    acc -= w_minus[i] * (d.control.outcomes[i] - 0.5);
  }
  return acc;
}

}  // namespace rdb
