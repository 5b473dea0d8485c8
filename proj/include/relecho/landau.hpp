#pragma once
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "relecho/error.hpp"
#include "relecho/grid.hpp"

// Relativistic Landau basis for a unit-charge particle in a homogeneous
// magnetic field (0, 0, H), symmetric gauge A = (-H y / 2, H x / 2, 0).
// Natural units throughout. The longitudinal direction is handled
// analytically as a plane-wave factor exp(i kz z); transverse structure
// lives on a TransverseGrid.

namespace relecho {

struct ParticleParams {
  double mass = 1.0;   // m > 0
  double field = 1.0;  // H > 0, magnetic field intensity
  double kz = 0.0;     // longitudinal momentum

  double magnetic_length() const { return 1.0 / std::sqrt(field); }
  void validate() const {
    if (!(mass > 0.0))
      throw Error(ErrorCode::Validation, "particle mass must be positive");
    if (!(field > 0.0))
      throw Error(ErrorCode::Validation, "field intensity must be positive");
    if (!std::isfinite(kz))
      throw Error(ErrorCode::Validation, "kz must be finite");
  }
};

// Label of one basis state. n is the orbital Landau index of the dominant
// upper component, ml its angular momentum (ml >= -n), spin = +1 for the
// branch aligned with the field and -1 for the other one. The aligned branch
// sits at effective level nu = n, the anti-aligned one at nu = n + 1, so the
// bottom energy rung nu = 0 is reachable only with spin = +1.
// energy_sign = -1 selects the negative-energy mirror state; this sector is
// experimental and excluded from the default basis.
struct QuantumNumbers {
  int n = 0;
  int ml = 0;
  int spin = +1;
  double kz = 0.0;
  int energy_sign = +1;

  void validate() const {
    if (n < 0) throw Error(ErrorCode::Validation, "n must be >= 0");
    if (ml < -n)
      throw Error(ErrorCode::Validation,
                  "ml must be >= -n for an existing orbital");
    if (spin != 1 && spin != -1)
      throw Error(ErrorCode::Validation, "spin must be +1 or -1");
    if (energy_sign != 1 && energy_sign != -1)
      throw Error(ErrorCode::Validation, "energy_sign must be +1 or -1");
  }
  bool operator==(const QuantumNumbers& o) const {
    return n == o.n && ml == o.ml && spin == o.spin && kz == o.kz &&
           energy_sign == o.energy_sign;
  }
};

// nu >= 0 combining the orbital index and the spin branch.
inline int effective_level(const QuantumNumbers& qn) {
  return qn.spin == +1 ? qn.n : qn.n + 1;
}

// E = sign * sqrt(m^2 + kz^2 + 2 nu H), exact closed form.
double landau_energy(const QuantumNumbers& qn, const ParticleParams& p);

struct BasisTruncation {
  int nu_max = 0;
  int ml_min = 0;
  int ml_max = 0;
  bool spin_up = true;
  bool spin_down = true;
  bool negative_energies = false;  // experimental
  int dim_ceiling = 4096;
};

// Deterministic enumeration: by nu, then spin branch (+1 first), then ml.
std::vector<QuantumNumbers> enumerate_basis(const BasisTruncation& t,
                                            double kz);

// All labels in the truncation whose energy differs from the reference's by
// at most tol * |E_ref|. Always contains the reference.
std::vector<QuantumNumbers> degenerate_set(const QuantumNumbers& reference,
                                           const ParticleParams& p,
                                           const BasisTruncation& t,
                                           double tol = 1e-9);

// Symmetric-gauge orbital, built by ladder operators acting on the ground
// Gaussian. The radial polynomial is stored exactly; evaluation goes through
// log-magnitude space so high-ml orbitals stay finite.
class LandauOrbital {
public:
  static LandauOrbital make(int level, int ml, double field);

  cplx eval(double x, double y) const;
  int level() const { return level_; }
  int ml() const { return ml_; }

private:
  int level_ = 0;
  int ml_ = 0;
  double field_ = 1.0;
  std::vector<double> logmag_;  // per radial power k: log |c_k|, or -inf
  std::vector<cplx> phase_;     // unit phases of c_k
};

// Orbital sampled on the grid, analytically unit-normalized (grid quadrature
// reproduces norm 1 within quadrature accuracy). Throws GridTooSmall when the
// boundary amplitude exceeds 1e-6 of the peak or when L < 6 magnetic lengths.
std::vector<cplx> landau_orbital(int n, int ml, double field,
                                 const TransverseGrid& grid);

// 4-component spinor sampled on the grid, AoS layout: data[node * 4 + c].
struct SpinorField {
  TransverseGrid grid;
  double kz = 0.0;
  std::vector<cplx> data;

  std::size_t nodes() const { return grid.nodes(); }
  cplx& at(std::size_t node, int c) { return data[node * 4 + c]; }
  const cplx& at(std::size_t node, int c) const { return data[node * 4 + c]; }
  double norm2() const;  // quadrature Dirac norm squared
};

// Eigenspinor of the unperturbed Dirac Hamiltonian in the Dirac
// representation, unit Dirac norm. Upper components carry the orbital in the
// spin slot; lower ones are (sigma.pi)/(E+m) applied to it, with the ladder
// action evaluated exactly.
SpinorField landau_spinor(const QuantumNumbers& qn, const ParticleParams& p,
                          const TransverseGrid& grid);

cplx dirac_inner(const SpinorField& a, const SpinorField& b);

// Second-order stencil application of H = alpha.(p - A) + beta m + kz alpha_z
// to a sampled spinor (zero field outside the grid).
SpinorField apply_dirac_stencil(const SpinorField& psi,
                                const ParticleParams& p);

// ||H psi - E psi|| / ||psi|| with the stencil Hamiltonian; decays at the
// stencil order as the grid is refined.
double dirac_residual(const SpinorField& psi, const QuantumNumbers& qn,
                      const ParticleParams& p);

std::string to_string(const QuantumNumbers& qn);

}  // namespace relecho
