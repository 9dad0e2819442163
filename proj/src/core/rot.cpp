#include "rot.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rdb {

namespace {

// Max |slope| between consecutive usable bin centers; NaN when fewer than
// two bins hold at least two observations each.
double side_rot(const side_sample& s, int bins) {
  const std::size_t n = s.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double lo = s.radii.front(), hi = s.radii.back();
  if (!(hi > lo)) return std::numeric_limits<double>::quiet_NaN();
  const double width = (hi - lo) / bins;

  std::vector<double> sum(bins, 0.0);
  std::vector<int> count(bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int b = static_cast<int>((s.radii[i] - lo) / width);
    b = std::min(b, bins - 1);
    sum[b] += s.outcomes[i];
    ++count[b];
  }

  double best = std::numeric_limits<double>::quiet_NaN();
  double prev_mean = 0.0, prev_center = 0.0;
  bool have_prev = false;
  for (int b = 0; b < bins; ++b) {
    if (count[b] < 2) continue;
    const double mean = sum[b] / count[b];
    const double center = lo + (b + 0.5) * width;
    if (have_prev) {
      const double slope = std::abs((mean - prev_mean) / (center - prev_center));
      if (std::isnan(best) || slope > best) best = slope;
    }
    prev_mean = mean;
    prev_center = center;
    have_prev = true;
  }
  return best;
}

}  // namespace

rot_result rot_lipschitz(const design& d, int bins) {
  if (bins < 2) throw error(errc::invalid_argument, "need at least 2 bins");
  rot_result out;
  out.c_plus = side_rot(d.treated, bins);
  out.c_minus = side_rot(d.control, bins);
  if (std::isnan(out.c_plus) && std::isnan(out.c_minus)) {
    throw error(errc::insufficient_data,
                "fewer than 2 usable bins on both sides");
  }
  out.c = 0.0;
  if (!std::isnan(out.c_plus)) out.c = std::max(out.c, out.c_plus);
  if (!std::isnan(out.c_minus)) out.c = std::max(out.c, out.c_minus);
  return out;
}

}  // namespace rdb
