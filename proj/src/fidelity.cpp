#include "relecho/fidelity.hpp"

#include <cmath>

#include "relecho/kernels.hpp"

namespace relecho {

const char* method_name(Method m) {
  switch (m) {
    case Method::overlap: return "overlap";
    case Method::current: return "current";
    case Method::ode: return "ode";
    case Method::perturbative: return "perturbative";
  }
  return "unknown";
}

FidelitySeries fidelity_overlap(const HamiltonianModel& model,
                                const Eigen::VectorXcd& psi0,
                                const std::vector<double>& times) {
  FidelitySeries s;
  s.method = Method::overlap;
  s.t = times;
  s.f.resize(times.size());
  s.F.resize(times.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < times.size(); ++k) {
    try {
      if (times[k] == 0.0) {
        s.f[k] = 1.0;  // shared initial condition, exactly
      } else {
        const Eigen::VectorXcd a = evolve(model, psi0, times[k], true);
        const Eigen::VectorXcd b = evolve(model, psi0, times[k], false);
        s.f[k] = a.dot(b);
      }
      s.F[k] = std::norm(s.f[k]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return s;
}

CurrentField current(const SpinorField& psi_eps, const SpinorField& psi) {
  require_same_grid(psi_eps.grid, psi.grid, "current");
  if (psi_eps.kz != psi.kz)
    throw Error(ErrorCode::GridMismatch, "current: fields differ in kz");

  CurrentField out;
  out.grid = psi.grid;
  const std::size_t nodes = psi.nodes();
  for (auto& comp : out.j) comp.assign(nodes, cplx{0.0});

  const cplx I{0.0, 1.0};
  for (std::size_t node = 0; node < nodes; ++node) {
    const cplx a0 = std::conj(psi_eps.at(node, 0));
    const cplx a1 = std::conj(psi_eps.at(node, 1));
    const cplx a2 = std::conj(psi_eps.at(node, 2));
    const cplx a3 = std::conj(psi_eps.at(node, 3));
    const cplx b0 = psi.at(node, 0);
    const cplx b1 = psi.at(node, 1);
    const cplx b2 = psi.at(node, 2);
    const cplx b3 = psi.at(node, 3);
    out.j[0][node] = a0 * b0 + a1 * b1 + a2 * b2 + a3 * b3;
    out.j[1][node] = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0;
    out.j[2][node] = I * (-a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0);
    out.j[3][node] = a0 * b2 - a1 * b3 + a2 * b0 - a3 * b1;
  }
  return out;
}

FidelitySeries fidelity_current(const HamiltonianModel& model,
                                const Eigen::VectorXcd& psi0,
                                const std::vector<double>& times) {
  FidelitySeries s;
  s.method = Method::current;
  s.t = times;
  s.f.resize(times.size());
  s.F.resize(times.size());
  const double area = model.grid.cell_area();
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < times.size(); ++k) {
    try {
      const SpinorField pe =
          model.reconstruct(evolve(model, psi0, times[k], true));
      const SpinorField pu =
          model.reconstruct(evolve(model, psi0, times[k], false));
      // integral of j^0 without materializing the full current field
      const cplx f =
          kern::cdotc(pe.data.data(), pu.data.data(), pe.data.size()) * area;
      s.f[k] = f;
      s.F[k] = std::norm(f);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return s;
}

ContinuityResidual continuity_residual(const HamiltonianModel& model,
                                       const Eigen::VectorXcd& psi0,
                                       double t) {
  const double eps = model.epsilon();
  const Eigen::VectorXcd ce = evolve(model, psi0, t, true);
  const Eigen::VectorXcd cu = evolve(model, psi0, t, false);

  // spectral time derivatives: cdot = -i H c
  const cplx mi{0.0, -1.0};
  Eigen::VectorXcd ce_dot =
      mi * (model.energies.cast<cplx>().asDiagonal() * ce +
            eps * (model.V * ce));
  Eigen::VectorXcd cu_dot(cu.size());
  for (int i = 0; i < cu.size(); ++i)
    cu_dot[i] = mi * model.energies[i] * cu[i];

  // norms are not 1, reconstruct directly instead of going through evolve
  const SpinorField pe = model.reconstruct(ce);
  const SpinorField pu = model.reconstruct(cu);
  const SpinorField pe_dot = model.reconstruct(ce_dot);
  const SpinorField pu_dot = model.reconstruct(cu_dot);

  const CurrentField cur = current(pe, pu);
  const std::size_t nodes = model.grid.nodes();

  // dt j^0 = (dt psi_eps)^dag psi + psi_eps^dag (dt psi)
  std::vector<cplx> dtj0(nodes, cplx{0.0});
  for (std::size_t node = 0; node < nodes; ++node) {
    cplx v{0.0};
    for (int c = 0; c < 4; ++c) {
      v += std::conj(pe_dot.at(node, c)) * pu.at(node, c);
      v += std::conj(pe.at(node, c)) * pu_dot.at(node, c);
    }
    dtj0[node] = v;
  }

  const std::vector<cplx> djx = diff_x(cur.j[1], model.grid);
  const std::vector<cplx> djy = diff_y(cur.j[2], model.grid);
  // the z factor is a plane wave shared by both states: dz j^z = 0

  const SampledPerturbation a =
      sample_perturbation(model.perturbation, model.grid);

  ContinuityResidual res;
  res.lhs.resize(nodes);
  res.rhs.resize(nodes);
  const cplx ieps{0.0, eps};
  for (std::size_t node = 0; node < nodes; ++node) {
    res.lhs[node] = dtj0[node] + djx[node] + djy[node];
    cplx amu_jmu{0.0};
    if (!a.A0.empty()) amu_jmu += a.A0[node] * cur.j[0][node];
    if (!a.Ax.empty()) amu_jmu -= a.Ax[node] * cur.j[1][node];
    if (!a.Ay.empty()) amu_jmu -= a.Ay[node] * cur.j[2][node];
    if (!a.Az.empty()) amu_jmu -= a.Az[node] * cur.j[3][node];
    res.rhs[node] = ieps * amu_jmu;
  }

  std::vector<cplx> diff(nodes);
  for (std::size_t node = 0; node < nodes; ++node)
    diff[node] = res.lhs[node] - res.rhs[node];
  res.lhs_norm = std::sqrt(quadrature_norm2(res.lhs, model.grid));
  res.rhs_norm = std::sqrt(quadrature_norm2(res.rhs, model.grid));
  res.residual_norm = std::sqrt(quadrature_norm2(diff, model.grid));
  return res;
}

cplx interaction_picture_v(const HamiltonianModel& model,
                           const Eigen::VectorXcd& psi0, double t) {
  Eigen::VectorXcd d(psi0.size());
  for (int i = 0; i < psi0.size(); ++i)
    d[i] = std::exp(cplx{0.0, -t * model.energies[i]}) * psi0[i];
  return d.dot(model.V * d);
}

namespace {

// |boundary surface term| for the pair (psi_eps, psi): the outward flux of
// the mixed current through the grid edge.
double boundary_flux(const HamiltonianModel& model, const SpinorField& pe,
                     const SpinorField& pu) {
  const TransverseGrid& g = model.grid;
  const int n = g.points;
  const double h = g.spacing();
  const cplx I{0.0, 1.0};
  cplx flux{0.0};
  auto jx = [&](std::size_t node) {
    return std::conj(pe.at(node, 0)) * pu.at(node, 3) +
           std::conj(pe.at(node, 1)) * pu.at(node, 2) +
           std::conj(pe.at(node, 2)) * pu.at(node, 1) +
           std::conj(pe.at(node, 3)) * pu.at(node, 0);
  };
  auto jy = [&](std::size_t node) {
    return I * (-std::conj(pe.at(node, 0)) * pu.at(node, 3) +
                std::conj(pe.at(node, 1)) * pu.at(node, 2) -
                std::conj(pe.at(node, 2)) * pu.at(node, 1) +
                std::conj(pe.at(node, 3)) * pu.at(node, 0));
  };
  for (int i = 0; i < n; ++i) {
    flux += -jx(g.index(0, i)) * h;      // left edge, outward normal -x
    flux += jx(g.index(n - 1, i)) * h;   // right edge
    flux += -jy(g.index(i, 0)) * h;      // bottom edge
    flux += jy(g.index(i, n - 1)) * h;   // top edge
  }
  return std::abs(flux);
}

}  // namespace

OdeResult fidelity_ode(const HamiltonianModel& model,
                       const Eigen::VectorXcd& psi0,
                       const std::vector<double>& times,
                       const OdeOptions& opts) {
  if (times.empty())
    throw Error(ErrorCode::Validation, "fidelity_ode: empty time grid");
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    if (times[k + 1] <= times[k])
      throw Error(ErrorCode::Validation,
                  "fidelity_ode: times must be strictly increasing");

  const double eps = model.epsilon();
  const cplx ieps{0.0, eps};
  // multiplicative first-order form: exact for constant potentials, equal to
  // the additive Born expression at this order
  auto rhs = [&](double t, cplx f) {
    return ieps * interaction_picture_v(model, psi0, t) * f;
  };

  OdeResult out;
  out.series.method = Method::ode;
  out.series.t = times;
  out.series.f.resize(times.size());
  out.series.F.resize(times.size());
  out.dFdt.resize(times.size());

  cplx f{1.0};
  double t = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double target = times[k];
    const int steps = opts.substeps;
    if (target > t) {
      const double dt = (target - t) / steps;
      for (int s = 0; s < steps; ++s) {
        const cplx k1 = rhs(t, f);
        const cplx k2 = rhs(t + dt / 2.0, f + dt / 2.0 * k1);
        const cplx k3 = rhs(t + dt / 2.0, f + dt / 2.0 * k2);
        const cplx k4 = rhs(t + dt, f + dt * k3);
        f += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
      }
      t = target;
    }
    out.series.f[k] = (target == 0.0) ? cplx{1.0} : f;
    out.series.F[k] = std::norm(out.series.f[k]);
    out.dFdt[k] =
        2.0 * std::real(std::conj(out.series.f[k]) * rhs(target, f));

    if (opts.monitor_boundary) {
      const SpinorField pe =
          model.reconstruct(evolve(model, psi0, target, true));
      const SpinorField pu =
          model.reconstruct(evolve(model, psi0, target, false));
      const double bf = boundary_flux(model, pe, pu);
      out.max_boundary_flux = std::max(out.max_boundary_flux, bf);
      if (bf > opts.boundary_threshold)
        throw Error(ErrorCode::BoundaryFluxTooLarge,
                    "boundary flux " + std::to_string(bf) +
                        " signals an unbound scenario");
    }
  }
  return out;
}

}  // namespace relecho
