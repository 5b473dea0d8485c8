#include "relecho/kg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace relecho::kg {

namespace {

std::vector<double> sample_profile(const Perturbation& pert,
                                   const Grid1D& grid) {
  std::vector<double> a(grid.n, 0.0);
  if (pert.A0)
    for (int i = 0; i < grid.n; ++i) {
      a[i] = pert.A0(grid.coord(i));
      if (!std::isfinite(a[i]))
        throw Error(ErrorCode::Validation, "KG perturbation is unbounded");
    }
  return a;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Real symmetric circulant of a spectral multiplier g(k).
Eigen::MatrixXd circulant_multiplier(const Grid1D& grid,
                                     const std::function<double(double)>& g) {
  const int n = grid.n;
  std::vector<double> row(n, 0.0);
  for (int d = 0; d < n; ++d) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double k = grid.wavenumber(j);
      s += g(k) * std::cos(k * grid.coord(d));
    }
    row[d] = s / n;
  }
  Eigen::MatrixXd m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = row[(a - b + n) % n];
  return m;
}

struct Generator {
  Eigen::MatrixXd d2;         // spectral second derivative
  std::vector<double> a0;     // sampled profile
  double mass = 0.0;
  double epsilon = 0.0;

  // (phi, pi) -> (pi, D2 phi - m^2 phi + eps^2 A0^2 phi - 2 i eps A0 pi)
  void apply(const std::vector<cplx>& phi, const std::vector<cplx>& pi,
             std::vector<cplx>& dphi, std::vector<cplx>& dpi) const {
    const int n = d2.rows();
    dphi = pi;
    dpi.assign(n, cplx{0.0});
    for (int a = 0; a < n; ++a) {
      cplx acc{0.0};
      for (int b = 0; b < n; ++b) acc += d2(a, b) * phi[b];
      const double aa = a0[a];
      acc += (-mass * mass + epsilon * epsilon * aa * aa) * phi[a];
      acc -= cplx{0.0, 2.0 * epsilon * aa} * pi[a];
      dpi[a] = acc;
    }
  }
};

Generator make_generator(const Grid1D& grid, double mass,
                         const Perturbation& pert) {
  Generator g;
  g.d2 = circulant_multiplier(grid, [](double k) { return -k * k; });
  g.a0 = sample_profile(pert, grid);
  g.mass = mass;
  g.epsilon = pert.epsilon;
  return g;
}

}  // namespace

cplx inner(const State& a, const State& b) {
  if (!(a.grid == b.grid))
    throw Error(ErrorCode::GridMismatch, "kg::inner: different grids");
  cplx s{0.0};
  for (int i = 0; i < a.grid.n; ++i)
    s += std::conj(a.phi[i]) * b.pi[i] - std::conj(a.pi[i]) * b.phi[i];
  return cplx{0.0, 1.0} * s * a.grid.spacing();
}

State make_mode(const Grid1D& grid, int mode, double mass) {
  grid.validate();
  State s;
  s.grid = grid;
  s.phi.resize(grid.n);
  s.pi.resize(grid.n);
  const double k = grid.wavenumber(mode);
  const double omega = std::sqrt(k * k + mass * mass);
  const double norm = 1.0 / std::sqrt(2.0 * omega * grid.length);
  for (int i = 0; i < grid.n; ++i) {
    s.phi[i] = norm * std::polar(1.0, k * grid.coord(i));
    s.pi[i] = cplx{0.0, -omega} * s.phi[i];
  }
  return s;
}

State make_packet(const Grid1D& grid, const std::vector<cplx>& mode_coeffs,
                  double mass) {
  grid.validate();
  State s;
  s.grid = grid;
  s.phi.assign(grid.n, cplx{0.0});
  s.pi.assign(grid.n, cplx{0.0});
  double total = 0.0;
  for (std::size_t j = 0; j < mode_coeffs.size(); ++j) {
    if (mode_coeffs[j] == cplx{0.0}) continue;
    const State mode = make_mode(grid, static_cast<int>(j), mass);
    for (int i = 0; i < grid.n; ++i) {
      s.phi[i] += mode_coeffs[j] * mode.phi[i];
      s.pi[i] += mode_coeffs[j] * mode.pi[i];
    }
    total += std::norm(mode_coeffs[j]);
  }
  if (total == 0.0)
    throw Error(ErrorCode::Validation, "KG packet has no support");
  const double scale = 1.0 / std::sqrt(total);
  for (int i = 0; i < grid.n; ++i) {
    s.phi[i] *= scale;
    s.pi[i] *= scale;
  }
  return s;
}

double stability_limit(const Grid1D& grid, double mass,
                       const Perturbation& pert) {
  const double kmax = M_PI / grid.spacing();
  const double a_max = max_abs(sample_profile(pert, grid));
  const double omega_bound =
      std::sqrt(kmax * kmax + mass * mass) + 2.0 * std::abs(pert.epsilon) * a_max;
  // RK4 covers |lambda dt| <= 2.82 on the imaginary axis
  return 2.8 / omega_bound;
}

State evolve(const State& s, double t, double mass, const Perturbation& pert,
             const EvolveOptions& opts) {
  s.grid.validate();
  if (t < 0.0)
    throw Error(ErrorCode::Validation, "KG evolution runs forward in time");
  const double limit = stability_limit(s.grid, mass, pert);
  double dt = opts.dt;
  if (dt == 0.0)
    dt = 0.08 * limit;  // keeps phase and norm errors below 1e-8 per horizon
  else if (dt > limit)
    throw Error(ErrorCode::StabilityViolation,
                "requested step " + std::to_string(dt) +
                    " exceeds the stability bound " + std::to_string(limit));
  if (t == 0.0) return s;

  const Generator gen = make_generator(s.grid, mass, pert);
  const int steps = std::max(1, static_cast<int>(std::ceil(t / dt)));
  dt = t / steps;

  const int n = s.grid.n;
  State cur = s;
  std::vector<cplx> k1p(n), k1q(n), k2p(n), k2q(n), k3p(n), k3q(n), k4p(n),
      k4q(n), tp(n), tq(n);
  for (int step = 0; step < steps; ++step) {
    gen.apply(cur.phi, cur.pi, k1p, k1q);
    for (int i = 0; i < n; ++i) {
      tp[i] = cur.phi[i] + 0.5 * dt * k1p[i];
      tq[i] = cur.pi[i] + 0.5 * dt * k1q[i];
    }
    gen.apply(tp, tq, k2p, k2q);
    for (int i = 0; i < n; ++i) {
      tp[i] = cur.phi[i] + 0.5 * dt * k2p[i];
      tq[i] = cur.pi[i] + 0.5 * dt * k2q[i];
    }
    gen.apply(tp, tq, k3p, k3q);
    for (int i = 0; i < n; ++i) {
      tp[i] = cur.phi[i] + dt * k3p[i];
      tq[i] = cur.pi[i] + dt * k3q[i];
    }
    gen.apply(tp, tq, k4p, k4q);
    for (int i = 0; i < n; ++i) {
      cur.phi[i] += dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
      cur.pi[i] += dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
    }
  }
  return cur;
}

cplx fidelity(const State& initial, double t, double mass,
              const Perturbation& pert) {
  const State perturbed = evolve(initial, t, mass, pert);
  const State free = evolve(initial, t, mass, Perturbation{0.0, pert.A0});
  return inner(perturbed, free);
}

Eigen::MatrixXcd propagator(const Grid1D& grid, double t, double mass,
                            const Perturbation& pert) {
  grid.validate();
  const int n = grid.n;
  const Eigen::MatrixXd d2 =
      circulant_multiplier(grid, [](double k) { return -k * k; });
  const std::vector<double> a0 = sample_profile(pert, grid);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  g.topRightCorner(n, n) = Eigen::MatrixXcd::Identity(n, n);
  g.bottomLeftCorner(n, n) = d2.cast<cplx>();
  for (int i = 0; i < n; ++i) {
    g(n + i, i) += -mass * mass + pert.epsilon * pert.epsilon * a0[i] * a0[i];
    g(n + i, n + i) = cplx{0.0, -2.0 * pert.epsilon * a0[i]};
  }
  return (g * t).exp();
}

Eigen::MatrixXcd echo_kernel(const Grid1D& grid, double t, double mass,
                             const Perturbation& pert,
                             std::size_t memory_ceiling_bytes) {
  const int n = grid.n;
  const std::size_t bytes =
      std::size_t(6) * (2 * n) * (2 * n) * sizeof(cplx);
  if (bytes > memory_ceiling_bytes)
    throw Error(ErrorCode::MemoryCeiling,
                "KG kernel assembly needs " + std::to_string(bytes >> 20) +
                    " MiB, above the configured ceiling");

  const Eigen::MatrixXcd u_eps = propagator(grid, t, mass, pert);
  const Eigen::MatrixXcd u_free =
      propagator(grid, t, mass, Perturbation{0.0, pert.A0});
  // positive-frequency initial data: pi0 = -i Omega phi0, with Omega the
  // spectral sqrt(-d_x^2 + m^2)
  const Eigen::MatrixXcd omega =
      circulant_multiplier(grid, [mass](double k) {
        return std::sqrt(k * k + mass * mass);
      }).cast<cplx>();
  const cplx mi{0.0, -1.0};

  // columns map initial phi to phi(t) / pi(t); pi rows are the generator-side
  // time derivative of the phi rows
  const Eigen::MatrixXcd p_eps =
      u_eps.topLeftCorner(n, n) + mi * u_eps.topRightCorner(n, n) * omega;
  const Eigen::MatrixXcd q_eps =
      u_eps.bottomLeftCorner(n, n) + mi * u_eps.bottomRightCorner(n, n) * omega;
  const Eigen::MatrixXcd p_free =
      u_free.topLeftCorner(n, n) + mi * u_free.topRightCorner(n, n) * omega;
  const Eigen::MatrixXcd q_free =
      u_free.bottomLeftCorner(n, n) +
      mi * u_free.bottomRightCorner(n, n) * omega;

  return cplx{0.0, 1.0} / grid.spacing() *
         (p_eps.adjoint() * q_free - q_eps.adjoint() * p_free);
}

cplx kernel_contract(const Eigen::MatrixXcd& kernel, const State& initial) {
  const int n = initial.grid.n;
  if (kernel.rows() != n || kernel.cols() != n)
    throw Error(ErrorCode::GridMismatch,
                "kernel size does not match the state grid");
  const Eigen::Map<const Eigen::VectorXcd> phi(initial.phi.data(), n);
  const double h = initial.grid.spacing();
  return (phi.adjoint() * kernel * phi)(0, 0) * h * h;
}

}  // namespace relecho::kg
