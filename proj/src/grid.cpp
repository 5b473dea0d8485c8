#include "relecho/grid.hpp"

namespace relecho {

std::vector<cplx> diff_x(const std::vector<cplx>& f, const TransverseGrid& g) {
  const int n = g.points;
  const double inv2h = 1.0 / (2.0 * g.spacing());
  std::vector<cplx> out(f.size());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const cplx right = (ix + 1 < n) ? f[g.index(ix + 1, iy)] : cplx{0.0};
      const cplx left = (ix - 1 >= 0) ? f[g.index(ix - 1, iy)] : cplx{0.0};
      out[g.index(ix, iy)] = (right - left) * inv2h;
    }
  }
  return out;
}

std::vector<cplx> diff_y(const std::vector<cplx>& f, const TransverseGrid& g) {
  const int n = g.points;
  const double inv2h = 1.0 / (2.0 * g.spacing());
  std::vector<cplx> out(f.size());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const cplx up = (iy + 1 < n) ? f[g.index(ix, iy + 1)] : cplx{0.0};
      const cplx down = (iy - 1 >= 0) ? f[g.index(ix, iy - 1)] : cplx{0.0};
      out[g.index(ix, iy)] = (up - down) * inv2h;
    }
  }
  return out;
}

}  // namespace relecho
