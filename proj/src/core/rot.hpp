#pragma once

#include "types.hpp"

namespace rdb {

struct rot_result {
  double c = 0.0;        // max over the usable sides
  double c_plus = 0.0;   // NaN when the side has < 2 usable bins
  double c_minus = 0.0;
};

/// Rule-of-thumb Lipschitz constant: per side, equal-width bins over the
/// radius range, outcome means per bin (bins with < 2 observations skipped),
/// largest absolute slope between consecutive usable bin centers.
rot_result rot_lipschitz(const design& d, int bins = 10);

}  // namespace rdb
