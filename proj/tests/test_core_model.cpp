#include "core/types.hpp"

#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using namespace rdb;

TEST_CASE("normalize_design recenters and sorts") {
  const std::vector<point> pts{{0.9, 1.0}, {1.1, 0.0}, {1.3, 1.0}};
  const design d = normalize_design(pts, 1.0);
  REQUIRE(d.treated.size() == 2);
  REQUIRE(d.control.size() == 1);
  CHECK(d.treated.radii[0] == doctest::Approx(0.1));
  CHECK(d.treated.radii[1] == doctest::Approx(0.3));
  CHECK(d.treated.outcomes[0] == 0.0);
  CHECK(d.treated.outcomes[1] == 1.0);
  CHECK(d.control.radii[0] == doctest::Approx(0.1));
  CHECK(d.control.outcomes[0] == 1.0);
  CHECK(d.treated.binary);
}

TEST_CASE("normalize_design sorts by radius within a side") {
  const std::vector<point> pts{{1.5, 0.0}, {1.2, 1.0}, {0.5, 1.0}};
  const design d = normalize_design(pts, 1.0);
  REQUIRE(d.treated.size() == 2);
  CHECK(d.treated.radii[0] == doctest::Approx(0.2));
  CHECK(d.treated.radii[1] == doctest::Approx(0.5));
  CHECK(d.treated.outcomes[0] == 1.0);
  CHECK(d.treated.outcomes[1] == 0.0);
}

TEST_CASE("normalize_design ties at the cutoff go to the treated side") {
  const std::vector<point> pts{{1.0, 1.0}, {0.5, 0.0}};
  const design d = normalize_design(pts, 1.0);
  CHECK(d.treated.size() == 1);
  CHECK(d.treated.radii[0] == 0.0);
}

TEST_CASE("normalize_design rejects bad inputs") {
  const std::vector<point> below{{0.1, 1.0}, {0.2, 0.0}};
  CHECK_THROWS_AS(normalize_design(below, 1.0), error);
  try {
    normalize_design(below, 1.0);
  } catch (const error& e) {
    CHECK(e.code() == errc::empty_side);
  }
  const std::vector<point> bad_y{{0.1, 1.5}, {2.0, 0.0}};
  CHECK_THROWS_AS(normalize_design(bad_y, 1.0), error);
}

TEST_CASE("normalize_design is idempotent up to tied radii") {
  rdbtest::draw rng(7);
  std::vector<point> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({rng.uniform(-2, 2), rng.uniform()});
  const design d1 = normalize_design(pts, 0.25);
  std::vector<point> again;
  for (std::size_t i = 0; i < d1.treated.size(); ++i) {
    again.push_back({0.25 + d1.treated.radii[i], d1.treated.outcomes[i]});
  }
  for (std::size_t i = 0; i < d1.control.size(); ++i) {
    again.push_back({0.25 - d1.control.radii[i], d1.control.outcomes[i]});
  }
  const design d2 = normalize_design(again, 0.25);
  CHECK(d2.treated.radii == d1.treated.radii);
  CHECK(d2.control.radii == d1.control.radii);
  CHECK(d2.treated.outcomes == d1.treated.outcomes);
  CHECK(d2.control.outcomes == d1.control.outcomes);
}

TEST_CASE("shrinkage_estimate examples") {
  const side_sample one({0.0}, {1.0});
  CHECK(shrinkage_estimate(one, weight_profile({1.0}, one.radii)) == 1.0);

  const side_sample some({0.1, 0.2, 0.3}, {1.0, 0.0, 1.0});
  CHECK(shrinkage_estimate(some, weight_profile({0.0, 0.0, 0.0}, some.radii)) == 0.5);

  const side_sample two({0.1, 0.2}, {1.0, 0.0});
  CHECK(shrinkage_estimate(two, weight_profile({0.5, 0.25}, two.radii)) ==
        doctest::Approx(0.625));

  CHECK_THROWS_AS(shrinkage_estimate(one, weight_profile({0.5, 0.5}, two.radii)), error);
}

TEST_CASE("shrinkage_estimate with full mass is the weighted mean") {
  rdbtest::draw rng(11);
  for (int it = 0; it < 50; ++it) {
    const int n = rng.uniform_int(1, 8);
    const auto radii = rng.sorted_radii(n);
    std::vector<double> y(n), w(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
      w[i] = rng.uniform();
      s += w[i];
    }
    for (double& x : w) x /= s;  // sum exactly ~1
    const side_sample sample(radii, y);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += w[i] * y[i];
    CHECK(shrinkage_estimate(sample, weight_profile(w, radii)) ==
          doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("ate_estimate examples and decomposition") {
  design d;
  d.treated = side_sample({0.0}, {1.0});
  d.control = side_sample({0.0}, {0.0});
  const weight_profile wp({1.0}, d.treated.radii);
  const weight_profile wm({1.0}, d.control.radii);
  CHECK(ate_estimate(d, wp, wm) == 1.0);

  const weight_profile zp({0.0}, d.treated.radii);
  const weight_profile zm({0.0}, d.control.radii);
  CHECK(ate_estimate(d, zp, zm) == 0.0);

  design sym;
  sym.treated = side_sample({0.1}, {1.0});
  sym.control = side_sample({0.1}, {1.0});
  const weight_profile h({0.5}, sym.treated.radii);
  CHECK(ate_estimate(sym, h, h) == 0.0);

  // difference of side estimates, exactly
  rdbtest::draw rng(3);
  for (int it = 0; it < 30; ++it) {
    design rd;
    const auto rp = rng.sorted_radii(rng.uniform_int(1, 6));
    const auto rm = rng.sorted_radii(rng.uniform_int(1, 6));
    std::vector<double> yp(rp.size()), ym(rm.size());
    for (double& v : yp) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
    for (double& v : ym) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
    rd.treated = side_sample(rp, yp);
    rd.control = side_sample(rm, ym);
    const weight_profile awp(rng.weights_in_w(static_cast<int>(rp.size())), rp);
    const weight_profile awm(rng.weights_in_w(static_cast<int>(rm.size())), rm);
    CHECK(ate_estimate(rd, awp, awm) ==
          doctest::Approx(shrinkage_estimate(rd.treated, awp) -
                          shrinkage_estimate(rd.control, awm))
              .epsilon(1e-15));
  }
}

TEST_CASE("weight_profile caches and validates") {
  const std::vector<double> radii{0.1, 0.4};
  const weight_profile w({0.25, 0.5}, radii);
  CHECK(w.shrinkage_mass() == doctest::Approx(0.75));
  CHECK(w.weighted_radius() == doctest::Approx(0.25 * 0.1 + 0.5 * 0.4));
  CHECK_THROWS_AS(weight_profile({0.8, 0.8}, radii), error);       // cap
  CHECK_NOTHROW(weight_profile({0.8, 0.8}, radii, false));         // inference mode
  CHECK_THROWS_AS(weight_profile({-0.1, 0.2}, radii, false), error);
}

TEST_CASE("mean_profile conversions and feasibility") {
  const mean_profile th({-0.5, -0.2, 0.1}, mean_profile::repr_t::theta);
  const mean_profile p = th.as_p();
  CHECK(p.values[0] == doctest::Approx(0.0));
  CHECK(p.values[2] == doctest::Approx(0.6));
  const mean_profile back = p.as_theta();
  for (std::size_t i = 0; i < th.values.size(); ++i) {
    CHECK(back.values[i] == th.values[i]);  // exact round trip
  }

  const std::vector<double> radii{0.3, 0.6};
  CHECK(th.lipschitz_feasible(radii, lipschitz_bound(1.0)));
  const mean_profile steep({-0.5, 0.5, 0.5}, mean_profile::repr_t::theta);
  CHECK_FALSE(steep.lipschitz_feasible(radii, lipschitz_bound(1.0)));
  CHECK_THROWS_AS(mean_profile({1.5}, mean_profile::repr_t::p), error);
}
