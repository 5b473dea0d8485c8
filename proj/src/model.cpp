#include "relecho/model.hpp"

#include <cmath>

#include "relecho/kernels.hpp"

namespace relecho {

namespace {

// w = (A^0 - alpha . A) psi, pointwise on every node.
void apply_perturbation_operator(const SampledPerturbation& a,
                                 const cplx* psi, cplx* w, std::size_t nodes) {
  const cplx I{0.0, 1.0};
  for (std::size_t node = 0; node < nodes; ++node) {
    const cplx v0 = psi[node * 4 + 0];
    const cplx v1 = psi[node * 4 + 1];
    const cplx v2 = psi[node * 4 + 2];
    const cplx v3 = psi[node * 4 + 3];
    cplx w0{0.0}, w1{0.0}, w2{0.0}, w3{0.0};
    if (!a.A0.empty()) {
      const double s = a.A0[node];
      w0 += s * v0;
      w1 += s * v1;
      w2 += s * v2;
      w3 += s * v3;
    }
    if (!a.Ax.empty()) {
      const double s = a.Ax[node];
      w0 -= s * v3;
      w1 -= s * v2;
      w2 -= s * v1;
      w3 -= s * v0;
    }
    if (!a.Ay.empty()) {
      const double s = a.Ay[node];
      w0 += I * (s * v3);
      w1 -= I * (s * v2);
      w2 += I * (s * v1);
      w3 -= I * (s * v0);
    }
    if (!a.Az.empty()) {
      const double s = a.Az[node];
      w0 -= s * v2;
      w1 += s * v3;
      w2 -= s * v0;
      w3 += s * v1;
    }
    w[node * 4 + 0] = w0;
    w[node * 4 + 1] = w1;
    w[node * 4 + 2] = w2;
    w[node * 4 + 3] = w3;
  }
}

}  // namespace

int HamiltonianModel::index_of(const QuantumNumbers& qn) const {
  for (int i = 0; i < dim(); ++i)
    if (basis[i] == qn) return i;
  return -1;
}

SpinorField HamiltonianModel::column_field(int j) const {
  SpinorField f;
  f.grid = grid;
  f.kz = particle.kz;
  f.data.assign(sampled.col(j).data(), sampled.col(j).data() + sampled.rows());
  return f;
}

SpinorField HamiltonianModel::reconstruct(const Eigen::VectorXcd& coeffs) const {
  SpinorField f;
  f.grid = grid;
  f.kz = particle.kz;
  f.data.assign(sampled.rows(), cplx{0.0});
  for (int j = 0; j < dim(); ++j)
    kern::caxpy(coeffs[j], sampled.col(j).data(), f.data.data(),
                f.data.size());
  return f;
}

HamiltonianModel assemble(const ParticleParams& p,
                          const PerturbationField& pert,
                          const BasisTruncation& trunc,
                          const TransverseGrid& grid,
                          const AssembleOptions& opts) {
  p.validate();
  grid.validate();

  HamiltonianModel model;
  model.particle = p;
  model.truncation = trunc;
  model.grid = grid;
  model.memory_ceiling_bytes = opts.memory_ceiling_bytes;

  model.perturbation = pert;
  if (p.kz != 0.0 && pert.boost_with_kz && !pert.is_zero()) {
    const double v = p.kz / std::sqrt(p.kz * p.kz + p.mass * p.mass);
    model.perturbation = pert.boosted(v);
    model.perturbation.epsilon = pert.epsilon;
  }

  if (!model.perturbation.is_zero() &&
      grid.spacing() > model.perturbation.min_scale / 8.0)
    throw Error(ErrorCode::GridTooCoarse,
                "grid spacing " + std::to_string(grid.spacing()) +
                    " does not resolve the perturbation scale " +
                    std::to_string(model.perturbation.min_scale) +
                    " with >= 8 points");

  model.basis = enumerate_basis(trunc, p.kz);
  const int d = model.dim();
  const std::size_t rows = grid.nodes() * 4;

  const std::size_t sample_bytes = rows * std::size_t(d) * sizeof(cplx);
  if (sample_bytes > opts.memory_ceiling_bytes)
    throw Error(ErrorCode::TruncationTooLarge,
                "sampled basis needs " + std::to_string(sample_bytes >> 20) +
                    " MiB, above the configured ceiling");

  model.energies.resize(d);
  for (int i = 0; i < d; ++i)
    model.energies[i] = landau_energy(model.basis[i], p);

  model.sampled.resize(rows, d);
  std::exception_ptr sampling_error;
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < d; ++j) {
    try {
      const SpinorField psi = landau_spinor(model.basis[j], p, grid);
      std::copy(psi.data.begin(), psi.data.end(),
                model.sampled.col(j).data());
    } catch (...) {
#pragma omp critical
      if (!sampling_error) sampling_error = std::current_exception();
    }
  }
  if (sampling_error) std::rethrow_exception(sampling_error);

  model.V = Eigen::MatrixXcd::Zero(d, d);
  if (!model.perturbation.is_zero()) {
    const SampledPerturbation a =
        sample_perturbation(model.perturbation, grid);
    const double area = grid.cell_area();
    std::vector<cplx> w(rows);
    for (int j = 0; j < d; ++j) {
      apply_perturbation_operator(a, model.sampled.col(j).data(), w.data(),
                                  grid.nodes());
#pragma omp parallel for schedule(static)
      for (int i = 0; i <= j; ++i) {
        const cplx vij =
            kern::cdotc(model.sampled.col(i).data(), w.data(), rows) * area;
        model.V(i, j) = vij;
        model.V(j, i) = std::conj(vij);
      }
    }
    model.V = ((model.V + model.V.adjoint()) / 2.0).eval();
  }

  if (opts.zero_diagonal_index >= 0) {
    if (opts.zero_diagonal_index >= d)
      throw Error(ErrorCode::Validation,
                  "zero_diagonal_index outside the basis");
    const cplx shift = model.V(opts.zero_diagonal_index,
                               opts.zero_diagonal_index);
    model.V.diagonal().array() -= shift;
  }

  Eigen::MatrixXcd h = model.V * pert.epsilon;
  h.diagonal() += model.energies.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::Validation, "eigendecomposition failed");
  model.evals = es.eigenvalues();
  model.evecs = es.eigenvectors();
  return model;
}

HamiltonianModel with_epsilon(HamiltonianModel model, double eps) {
  model.perturbation.epsilon = eps;
  Eigen::MatrixXcd h = model.V * eps;
  h.diagonal() += model.energies.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::Validation, "eigendecomposition failed");
  model.evals = es.eigenvalues();
  model.evecs = es.eigenvectors();
  return model;
}

Eigen::VectorXcd evolve(const HamiltonianModel& model,
                        const Eigen::VectorXcd& state, double t,
                        bool perturbed) {
  if (state.size() != model.dim())
    throw Error(ErrorCode::Validation, "state dimension mismatch");
  const double n = state.norm();
  if (std::abs(n - 1.0) > 1e-8)
    throw Error(ErrorCode::Validation,
                "evolve expects a normalized state, got norm " +
                    std::to_string(n));
  const cplx mit{0.0, -t};
  if (!perturbed) {
    Eigen::VectorXcd out = state;
    for (int i = 0; i < out.size(); ++i)
      out[i] *= std::exp(mit * model.energies[i]);
    return out;
  }
  Eigen::VectorXcd c = model.evecs.adjoint() * state;
  for (int i = 0; i < c.size(); ++i) c[i] *= std::exp(mit * model.evals[i]);
  return model.evecs * c;
}

EchoOperator echo_operator(const HamiltonianModel& model, double t) {
  const int d = model.dim();
  // U_eps(t)^dagger = Q diag(e^{+i lambda t}) Q^dagger
  Eigen::VectorXcd phases(d);
  for (int i = 0; i < d; ++i)
    phases[i] = std::exp(cplx{0.0, t * model.evals[i]});
  Eigen::MatrixXcd m =
      model.evecs * phases.asDiagonal() * model.evecs.adjoint();
  for (int j = 0; j < d; ++j)
    m.col(j) *= std::exp(cplx{0.0, -t * model.energies[j]});
  return EchoOperator{t, std::move(m)};
}

Eigen::MatrixXcd echo_kernel(const HamiltonianModel& model, double t) {
  const std::size_t rows = model.sampled.rows();
  const std::size_t bytes = rows * rows * sizeof(cplx);
  if (bytes > model.memory_ceiling_bytes)
    throw Error(ErrorCode::MemoryCeiling,
                "echo kernel needs " + std::to_string(bytes >> 20) +
                    " MiB, above the configured ceiling");
  const EchoOperator op = echo_operator(model, t);
  return model.sampled * op.matrix * model.sampled.adjoint();
}

cplx echo_kernel_contract(const Eigen::MatrixXcd& kernel, const SpinorField& a,
                          const SpinorField& b) {
  require_same_grid(a.grid, b.grid, "echo_kernel_contract");
  const Eigen::Map<const Eigen::VectorXcd> va(a.data.data(), a.data.size());
  const Eigen::Map<const Eigen::VectorXcd> vb(b.data.data(), b.data.size());
  const double area = a.grid.cell_area();
  return (va.adjoint() * kernel * vb)(0, 0) * area * area;
}

}  // namespace relecho
