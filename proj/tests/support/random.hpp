#pragma once

#include <random>

#include "tjflow/tension_algebra.hpp"

namespace tjflow::tjtest {

// Admissible tensions drawn from [lo, hi]^3 with a margin on the triangle inequality.
inline SurfaceTensions random_tensions(std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (;;) {
    SurfaceTensions t;
    t.gamma = {u(rng), u(rng), u(rng)};
    const auto& g = t.gamma;
    if (g[0] < 0.98 * (g[1] + g[2]) && g[1] < 0.98 * (g[0] + g[2]) && g[2] < 0.98 * (g[0] + g[1])) return t;
  }
}

}  // namespace tjflow::tjtest
