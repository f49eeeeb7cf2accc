#pragma once

#include <cmath>
#include <vector>

#include "ttprob/scoring.hpp"

namespace ttprob {

/// Inclusive arithmetic grid lo, lo+step, ..., hi. Points are snapped to 12
/// decimals so 0.1-step grids land on the nearest doubles to 0.1, 0.2, ...
struct GridSpec {
  double lo = 0.1;
  double hi = 0.9;
  double step = 0.1;

  std::vector<double> values() const {
    if (!(step > 0.0) || !(hi >= lo)) throw InvalidArgument("grid needs step > 0 and hi >= lo");
    const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return out;
  }
};

}  // namespace ttprob
