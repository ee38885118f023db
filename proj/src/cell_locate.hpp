#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "harmavg/geometry.hpp"

namespace harmavg::detail {

struct CellLocation {
  std::size_t origin = 0;  // flat index of the lowest corner
  Point frac{};            // local coordinates in [0, 1]
};

// Shared by stencil construction, the kernels and eval so that all of them
// agree on which cell a quadrature point falls in.
inline CellLocation locate(const GridSpec& grid, const Point& p) {
  CellLocation loc;
  for (int a = 0; a < grid.dim(); ++a) {
    const double f = (p[a] - grid.lo()[a]) * grid.inv_spacing(a);
    // Truncation equals floor for f >= 0; negative f is clamped to cell 0
    // either way.
    int i = static_cast<int>(f);
    i = std::clamp(i, 0, grid.nodes(a) - 2);
    loc.frac[a] = std::clamp(f - i, 0.0, 1.0);
    loc.origin += grid.stride(a) * static_cast<std::size_t>(i);
  }
  return loc;
}

inline std::size_t corner_index(const GridSpec& grid, std::size_t origin,
                                int corner) {
  std::size_t idx = origin;
  for (int a = 0; a < grid.dim(); ++a) {
    if (corner & (1 << a)) idx += grid.stride(a);
  }
  return idx;
}

inline double corner_weight(int dim, const Point& frac, int corner) {
  double w = 1.0;
  for (int a = 0; a < dim; ++a) {
    w *= (corner & (1 << a)) ? frac[a] : 1.0 - frac[a];
  }
  return w;
}

}  // namespace harmavg::detail
