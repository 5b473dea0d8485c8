#include "relecho/perturbation_field.hpp"

#include <algorithm>

namespace relecho {

PerturbationField PerturbationField::tabulated(double eps,
                                               const TransverseGrid& grid,
                                               std::vector<double> a0,
                                               std::vector<double> ax,
                                               std::vector<double> ay,
                                               std::vector<double> az) {
  auto check = [&](const std::vector<double>& v, const char* name) {
    if (!v.empty() && v.size() != grid.nodes())
      throw Error(ErrorCode::Validation,
                  std::string("tabulated component ") + name +
                      " has wrong length for the grid");
  };
  check(a0, "A0");
  check(ax, "Ax");
  check(ay, "Ay");
  check(az, "Az");

  auto lookup = [grid](std::vector<double> tab) -> Profile {
    if (tab.empty()) return nullptr;
    return [grid, tab = std::move(tab)](double x, double y) {
      // nearest node; tabulated fields are grid-locked by construction
      const double h = grid.spacing();
      int ix = static_cast<int>(std::floor((x + grid.extent) / h));
      int iy = static_cast<int>(std::floor((y + grid.extent) / h));
      ix = std::clamp(ix, 0, grid.points - 1);
      iy = std::clamp(iy, 0, grid.points - 1);
      return tab[grid.index(ix, iy)];
    };
  };

  PerturbationField f;
  f.epsilon = eps;
  f.A0 = lookup(std::move(a0));
  f.Ax = lookup(std::move(ax));
  f.Ay = lookup(std::move(ay));
  f.Az = lookup(std::move(az));
  f.min_scale = 2.0 * grid.spacing();  // cannot resolve below the table
  return f;
}

SampledPerturbation sample_perturbation(const PerturbationField& f,
                                        const TransverseGrid& grid) {
  SampledPerturbation out;
  auto fill = [&](const PerturbationField::Profile& p,
                  std::vector<double>& dst) {
    if (!p) return;
    dst.resize(grid.nodes());
    for (int iy = 0; iy < grid.points; ++iy) {
      const double y = grid.coord(iy);
      for (int ix = 0; ix < grid.points; ++ix) {
        const double v = p(grid.coord(ix), y);
        if (!std::isfinite(v))
          throw Error(ErrorCode::Validation,
                      "perturbation component is unbounded on the grid");
        dst[grid.index(ix, iy)] = v;
        out.max_abs = std::max(out.max_abs, std::abs(v));
      }
    }
  };
  fill(f.A0, out.A0);
  fill(f.Ax, out.Ax);
  fill(f.Ay, out.Ay);
  fill(f.Az, out.Az);
  return out;
}

}  // namespace relecho
