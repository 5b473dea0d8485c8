#pragma once
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "relecho/grid.hpp"

namespace relecho {

// Static, z-independent perturbing 4-potential A^mu(x, y) with modulation
// strength epsilon. Components are callables; a null component is identically
// zero. min_scale is the finest length scale present, used to police grid
// resolution.
//
// When a scenario carries longitudinal momentum kz and boost_with_kz is set,
// the field assembled for that scenario is the covariant z-boost of this
// profile (the profile is the kz = 0 description of the same physical
// perturbation). A pure scalar profile then acquires a longitudinal vector
// component gamma*v*A0 and the scalar part becomes gamma*A0.
struct PerturbationField {
  using Profile = std::function<double(double, double)>;

  double epsilon = 0.0;
  Profile A0, Ax, Ay, Az;
  double min_scale = std::numeric_limits<double>::infinity();
  bool boost_with_kz = true;

  bool is_zero() const { return !A0 && !Ax && !Ay && !Az; }

  static PerturbationField zero(double eps = 0.0) {
    PerturbationField f;
    f.epsilon = eps;
    return f;
  }

  static PerturbationField constant_scalar(double eps, double value) {
    PerturbationField f;
    f.epsilon = eps;
    f.A0 = [value](double, double) { return value; };
    return f;
  }

  static PerturbationField gaussian_scalar(double eps, double amplitude,
                                           double sigma, double x0 = 0.0,
                                           double y0 = 0.0) {
    PerturbationField f;
    f.epsilon = eps;
    f.A0 = [=](double x, double y) {
      const double dx = x - x0, dy = y - y0;
      return amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    };
    f.min_scale = sigma;
    return f;
  }

  // Azimuthal vector potential with a Gaussian envelope: a localized bump of
  // longitudinal magnetic field on top of the background.
  static PerturbationField gaussian_vector(double eps, double amplitude,
                                           double sigma, double x0 = 0.0,
                                           double y0 = 0.0) {
    PerturbationField f;
    f.epsilon = eps;
    auto envelope = [=](double x, double y) {
      const double dx = x - x0, dy = y - y0;
      return amplitude *
             std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)) / sigma;
    };
    f.Ax = [=](double x, double y) { return -(y - y0) * envelope(x, y); };
    f.Ay = [=](double x, double y) { return (x - x0) * envelope(x, y); };
    f.min_scale = sigma;
    return f;
  }

  // Components tabulated on a specific grid; using them on any other grid is
  // a GridMismatch.
  static PerturbationField tabulated(double eps, const TransverseGrid& grid,
                                     std::vector<double> a0,
                                     std::vector<double> ax = {},
                                     std::vector<double> ay = {},
                                     std::vector<double> az = {});

  // Covariant boost along z with velocity v.
  PerturbationField boosted(double v) const {
    PerturbationField f = *this;
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    Profile a0 = A0, az = Az;
    auto val = [](const Profile& p, double x, double y) {
      return p ? p(x, y) : 0.0;
    };
    if (A0 || Az) {
      f.A0 = [=](double x, double y) {
        return gamma * (val(a0, x, y) + v * val(az, x, y));
      };
      f.Az = [=](double x, double y) {
        return gamma * (val(az, x, y) + v * val(a0, x, y));
      };
    }
    return f;
  }
};

// Components evaluated on grid nodes.
struct SampledPerturbation {
  std::vector<double> A0, Ax, Ay, Az;  // empty when the component is zero
  double max_abs = 0.0;
};

SampledPerturbation sample_perturbation(const PerturbationField& f,
                                        const TransverseGrid& grid);

}  // namespace relecho
