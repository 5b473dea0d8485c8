#pragma once
#include <Eigen/Dense>
#include <cstddef>

#include "relecho/landau.hpp"
#include "relecho/perturbation_field.hpp"

// Perturbed Dirac Hamiltonian in the truncated Landau basis:
// H(eps) = diag(E_i) + eps V with V_ij the grid-quadrature matrix element of
// the perturbation operator A^0 - alpha . A between sampled basis spinors.
// Time evolution goes through the stored dense eigendecomposition, so long
// echo horizons carry no secular integrator drift.

namespace relecho {

struct AssembleOptions {
  // When >= 0, subtract V_ii of this basis index from the whole diagonal
  // (a constant gauge shift making the designated state's diagonal element
  // vanish).
  int zero_diagonal_index = -1;
  // Ceiling for the sampled-basis block (and for echo kernels).
  std::size_t memory_ceiling_bytes = std::size_t(3) << 30;
};

class HamiltonianModel {
public:
  ParticleParams particle;
  BasisTruncation truncation;
  TransverseGrid grid;
  PerturbationField perturbation;  // post-boost field actually assembled
  std::vector<QuantumNumbers> basis;
  Eigen::VectorXd energies;  // unperturbed Landau energies
  Eigen::MatrixXcd V;        // Hermitian perturbation matrix, epsilon excluded
  Eigen::VectorXd evals;     // eigendecomposition of diag(E) + eps V
  Eigen::MatrixXcd evecs;
  Eigen::MatrixXcd sampled;  // 4M x D basis spinors, column-major
  std::size_t memory_ceiling_bytes = 0;

  int dim() const { return static_cast<int>(basis.size()); }
  double epsilon() const { return perturbation.epsilon; }

  // Basis index of a label, -1 when absent.
  int index_of(const QuantumNumbers& qn) const;

  SpinorField column_field(int j) const;
  SpinorField reconstruct(const Eigen::VectorXcd& coeffs) const;
};

// Builds basis, matrix elements and both eigendecompositions. The field used
// is pert itself at kz = 0, or its covariant boost when the particle carries
// kz and pert.boost_with_kz is set.
HamiltonianModel assemble(const ParticleParams& p,
                          const PerturbationField& pert,
                          const BasisTruncation& trunc,
                          const TransverseGrid& grid,
                          const AssembleOptions& opts = {});

// Same model at a different strength: V is epsilon-independent, only the
// eigendecomposition of diag(E) + eps V is redone.
HamiltonianModel with_epsilon(HamiltonianModel model, double eps);

// exp(-i H t) applied through the stored eigendecomposition.
Eigen::VectorXcd evolve(const HamiltonianModel& model,
                        const Eigen::VectorXcd& state, double t,
                        bool perturbed);

struct EchoOperator {
  double t = 0.0;
  Eigen::MatrixXcd matrix;  // U_eps(t)^dagger U_0(t)
};

EchoOperator echo_operator(const HamiltonianModel& model, double t);

// Position-representation kernel K = S M S^dagger (4M x 4M). Contracting with
// sampled spinors under grid quadrature reproduces <psi_a | M_t | psi_b>.
Eigen::MatrixXcd echo_kernel(const HamiltonianModel& model, double t);

cplx echo_kernel_contract(const Eigen::MatrixXcd& kernel,
                          const SpinorField& a, const SpinorField& b);

}  // namespace relecho
