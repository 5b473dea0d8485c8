#pragma once
#include <complex>
#include <cstddef>
#include <vector>

#include "relecho/error.hpp"

namespace relecho {

using cplx = std::complex<double>;

// Square transverse grid covering [-extent, extent)^2 with cell-centered
// nodes, so no sample ever lands on the origin. Node (ix, iy) sits at
// (coord(ix), coord(iy)) and flattens to iy * points + ix.
struct TransverseGrid {
  double extent = 0.0;  // half-width L
  int points = 0;       // N per axis, even

  double spacing() const { return 2.0 * extent / points; }
  double coord(int i) const { return -extent + (i + 0.5) * spacing(); }
  std::size_t nodes() const {
    return static_cast<std::size_t>(points) * points;
  }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * points + ix;
  }
  double cell_area() const { return spacing() * spacing(); }

  bool operator==(const TransverseGrid& o) const {
    return extent == o.extent && points == o.points;
  }

  void validate() const {
    if (points < 16 || points % 2 != 0)
      throw Error(ErrorCode::Validation,
                  "grid points must be even and >= 16, got " +
                      std::to_string(points));
    if (!(extent > 0.0))
      throw Error(ErrorCode::Validation, "grid extent must be positive");
  }
};

inline void require_same_grid(const TransverseGrid& a, const TransverseGrid& b,
                              const char* what) {
  if (!(a == b))
    throw Error(ErrorCode::GridMismatch,
                std::string(what) + ": fields live on different grids");
}

// Second-order central difference of a scalar field along x or y.
// Values outside the grid are taken as zero (fields here decay to the
// boundary; callers guard that with amplitude checks).
std::vector<cplx> diff_x(const std::vector<cplx>& f, const TransverseGrid& g);
std::vector<cplx> diff_y(const std::vector<cplx>& f, const TransverseGrid& g);

inline double quadrature_norm2(const std::vector<cplx>& f,
                               const TransverseGrid& g) {
  double s = 0.0;
  for (const auto& v : f) s += std::norm(v);
  return s * g.cell_area();
}

}  // namespace relecho
