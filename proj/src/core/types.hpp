#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdb {

enum class errc {
  invalid_argument,
  empty_side,
  out_of_range_outcome,
  length_mismatch,
  too_large,
  anchor_out_of_range,
  negative_variance,
  insufficient_data,
  parse,
  numeric,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

/// One side of a recentered design. Radii are distances from the cutoff,
/// sorted nondecreasing; outcomes lie in [0,1] ({0,1} when `binary`).
struct side_sample {
  std::vector<double> radii;
  std::vector<double> outcomes;
  bool binary = false;

  side_sample() = default;
  side_sample(std::vector<double> r, std::vector<double> y);

  std::size_t size() const noexcept { return radii.size(); }
};

/// Recentered two-sided design around a single cutoff.
struct design {
  side_sample treated;
  side_sample control;
  double cutoff = 0.0;
};

/// Bound on the outcome-probability change per unit of running-variable
/// distance. Must be finite and nonnegative.
struct lipschitz_bound {
  double c;
  explicit lipschitz_bound(double value);
};

/// Nonnegative per-observation weights for one side, with the shrinkage mass
/// u = sum(w) and the weighted radius k = sum(w_i * r_i) cached.
/// Shrinkage profiles require u <= 1 + 1e-12; inference accepts any
/// nonnegative weights, so the cap check is optional.
class weight_profile {
 public:
  weight_profile() = default;
  weight_profile(std::vector<double> w, std::span<const double> radii,
                 bool shrinkage = true);

  const std::vector<double>& values() const noexcept { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  std::size_t size() const noexcept { return w_.size(); }
  double shrinkage_mass() const noexcept { return u_; }
  double weighted_radius() const noexcept { return k_; }

 private:
  std::vector<double> w_;
  double u_ = 0.0;
  double k_ = 0.0;
};

/// Mean vector with entry 0 at the boundary; either theta-scale values in
/// [-1/2,1/2] or p-scale values in [0,1].
struct mean_profile {
  enum class repr_t { theta, p };

  std::vector<double> values;
  repr_t repr = repr_t::theta;

  mean_profile() = default;
  mean_profile(std::vector<double> v, repr_t r);

  mean_profile as_theta() const;
  mean_profile as_p() const;

  /// Radial Lipschitz feasibility against a sorted radius list (entry i
  /// compared with radius r_i, entry 0 with radius 0), tolerance 1e-12.
  bool lipschitz_feasible(std::span<const double> radii, lipschitz_bound c) const;
};

struct point {
  double r;
  double y;
};

/// Split raw points at the cutoff (ties go to the treated side), recenter to
/// radii and sort each side by radius ascending, stable on ties.
design normalize_design(std::span<const point> points, double cutoff);

/// 1/2 + sum w_i (Y_i - 1/2).
double shrinkage_estimate(const side_sample& sample, const weight_profile& weights);

/// sum w_{i,+}(Y_{i,+} - 1/2) - sum w_{i,-}(Y_{i,-} - 1/2).
double ate_estimate(const design& d, const weight_profile& w_plus,
                    const weight_profile& w_minus);

}  // namespace rdb
