#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "relecho/error.hpp"

// 1+1 dimensional Klein-Gordon toy on a periodic grid: indefinite inner
// product, fidelity under a static scalar perturbation, and the echo kernel
// built from numerically assembled propagators. The propagator is realized as
// the forward-in-time evolution kernel of initial data; no hermitian
// Hamiltonian form is assumed anywhere, conservation statements rest on the
// bilinear form.

namespace relecho::kg {

using cplx = std::complex<double>;

struct Grid1D {
  int n = 0;          // nodes
  double length = 0;  // periodic domain length

  double spacing() const { return length / n; }
  double coord(int i) const { return i * spacing(); }
  // mode wavenumbers 2 pi j / length, j = -n/2 .. n/2 - 1
  double wavenumber(int j) const {
    const int jj = j <= n / 2 ? j : j - n;
    return 2.0 * M_PI * jj / length;
  }
  bool operator==(const Grid1D& o) const {
    return n == o.n && length == o.length;
  }
  void validate() const {
    if (n < 8 || n % 2 != 0)
      throw Error(ErrorCode::Validation, "KG grid needs even n >= 8");
    if (!(length > 0.0))
      throw Error(ErrorCode::Validation, "KG grid length must be positive");
  }
};

// (phi, pi = d_t phi) on the grid.
struct State {
  Grid1D grid;
  std::vector<cplx> phi, pi;
};

struct Perturbation {
  double epsilon = 0.0;
  std::function<double(double)> A0;  // static scalar profile, may be null

  static Perturbation zero() { return {}; }
  static Perturbation constant(double eps, double value) {
    return {eps, [value](double) { return value; }};
  }
  static Perturbation gaussian(double eps, double amplitude, double sigma,
                               double x0) {
    return {eps, [=](double x) {
              const double d = x - x0;
              return amplitude * std::exp(-d * d / (2.0 * sigma * sigma));
            }};
  }
};

// Indefinite product i * sum_x [phi1^* pi2 - pi1^* phi2] h. Sesquilinear,
// conjugate-symmetric, no positivity.
cplx inner(const State& a, const State& b);

// Positive-frequency plane-wave mode j, unit KG norm.
State make_mode(const Grid1D& grid, int mode, double mass);
// Normalized positive-frequency packet with the given mode coefficients.
State make_packet(const Grid1D& grid, const std::vector<cplx>& mode_coeffs,
                  double mass);

struct EvolveOptions {
  double dt = 0.0;  // 0 = choose automatically from the stability bound
};

// RK4 time stepping of the first-order reduction. The requested step must
// respect the spectral stability bound, else StabilityViolation.
State evolve(const State& s, double t, double mass, const Perturbation& pert,
             const EvolveOptions& opts = {});

// Largest stable RK4 step for this grid and perturbation.
double stability_limit(const Grid1D& grid, double mass,
                       const Perturbation& pert);

// f(t) = <phi(eps), t | phi, t>: evolve twice, apply the inner product.
cplx fidelity(const State& initial, double t, double mass,
              const Perturbation& pert);

// 2N x 2N matrix mapping (phi, pi) at time 0 to time t, from the dense
// matrix exponential of the generator. Conserves the KG form at eps = 0.
Eigen::MatrixXcd propagator(const Grid1D& grid, double t, double mass,
                            const Perturbation& pert);

// N x N echo kernel: the x'' quadrature of conj(prop_eps) d_t prop -
// prop d_t conj(prop_eps), with time derivatives taken from the generator
// and positive-frequency initial data folded in. Contracting with initial
// phi under grid quadrature reproduces fidelity().
Eigen::MatrixXcd echo_kernel(const Grid1D& grid, double t, double mass,
                             const Perturbation& pert,
                             std::size_t memory_ceiling_bytes = std::size_t(1)
                                                                << 30);

// h^2 * phi0^dag K phi0
cplx kernel_contract(const Eigen::MatrixXcd& kernel, const State& initial);

}  // namespace relecho::kg
