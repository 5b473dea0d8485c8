#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "relecho/model.hpp"
#include "relecho/scenario.hpp"

using namespace relecho;

namespace {

const TransverseGrid kGrid{10.0, 128};
const ParticleParams kParticle{1.0, 1.0, 0.0};

BasisTruncation small_truncation() {
  BasisTruncation tr;
  tr.nu_max = 1;
  tr.ml_min = 0;
  tr.ml_max = 3;
  return tr;
}

PerturbationField test_bump(double eps) {
  return PerturbationField::gaussian_scalar(eps, 1.0, 1.5, 1.5, 0.0);
}

}  // namespace

TEST_CASE("assemble: zero field gives V = 0 and Landau eigenvalues") {
  const auto model = assemble(kParticle, PerturbationField::zero(0.0),
                              small_truncation(), kGrid);
  CHECK(model.V.cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < model.dim(); ++i) {
    const double e = landau_energy(model.basis[i], kParticle);
    CHECK(model.evals[i] == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("assemble: constant scalar potential is the identity shift") {
  const double c = 0.37;
  const auto model = assemble(kParticle,
                              PerturbationField::constant_scalar(0.01, c),
                              small_truncation(), kGrid);
  for (int i = 0; i < model.dim(); ++i)
    for (int j = 0; j < model.dim(); ++j) {
      const cplx expected = i == j ? cplx{c} : cplx{0.0};
      CHECK(std::abs(model.V(i, j) - expected) < 1e-8);
    }
}

TEST_CASE("assemble: Gaussian bump element against independent quadrature") {
  // A0 = exp(-r^2 H / 2), diagonal element of the lowest state at kz = 0:
  // V_00 = integral of |phi_00|^2 A0 with |phi_00|^2 = (H/2pi) exp(-H r^2/2)
  const double H = 1.0;
  PerturbationField f;
  f.epsilon = 1e-3;
  f.A0 = [H](double x, double y) {
    return std::exp(-(x * x + y * y) * H / 2.0);
  };
  f.min_scale = 1.0;

  BasisTruncation tr;
  tr.nu_max = 0;
  tr.ml_min = 0;
  tr.ml_max = 0;
  tr.spin_down = false;
  const TransverseGrid grid{8.0, 128};
  const auto model = assemble(kParticle, f, tr, grid);

  const double expected = oracle::quad2d(
      [H](double x, double y) {
        const double r2 = x * x + y * y;
        return (H / (2.0 * M_PI)) * std::exp(-H * r2 / 2.0) *
               std::exp(-H * r2 / 2.0);
      },
      grid.extent, 96);
  CHECK(model.V(0, 0).real() == doctest::Approx(expected).epsilon(1e-9));
  CHECK(std::abs(model.V(0, 0).imag()) < 1e-12);
}

TEST_CASE("assemble: hermiticity, reconstruction, linearity in epsilon") {
  const auto model = assemble(kParticle, test_bump(2e-3), small_truncation(),
                              kGrid);
  const int d = model.dim();

  CHECK((model.V - model.V.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);

  Eigen::MatrixXcd h = model.V * model.epsilon();
  h.diagonal() += model.energies.cast<cplx>();
  const Eigen::MatrixXcd rebuilt = model.evecs *
                                   model.evals.asDiagonal().toDenseMatrix() *
                                   model.evecs.adjoint();
  CHECK((rebuilt - h).norm() / h.norm() <= 1e-10);

  // epsilon only rescales the stored decomposition input, never V
  const auto model2 = assemble(kParticle, test_bump(4e-3), small_truncation(),
                               kGrid);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) CHECK(model.V(i, j) == model2.V(i, j));
}

TEST_CASE("assemble: diagonal reference shift") {
  AssembleOptions opts;
  opts.zero_diagonal_index = 0;
  const auto model = assemble(kParticle, test_bump(1e-3), small_truncation(),
                              kGrid, opts);
  CHECK(std::abs(model.V(0, 0)) < 1e-14);
}

TEST_CASE("assemble: resolution and memory guards") {
  // sigma = 0.5 wants h <= 0.0625; the 128-point grid has h ~ 0.156
  const auto narrow = PerturbationField::gaussian_scalar(1e-3, 1.0, 0.5);
  CHECK_THROWS_AS(assemble(kParticle, narrow, small_truncation(), kGrid),
                  Error);

  AssembleOptions opts;
  opts.memory_ceiling_bytes = 1 << 20;
  CHECK_THROWS_AS(
      assemble(kParticle, test_bump(1e-3), small_truncation(), kGrid, opts),
      Error);
}

TEST_CASE("evolve: identity at t = 0 and eigenphases") {
  const auto model = assemble(kParticle, test_bump(1e-3), small_truncation(),
                              kGrid);
  const int d = model.dim();

  const Eigen::VectorXcd psi = random_superposition(d, 42);
  const Eigen::VectorXcd same = evolve(model, psi, 0.0, true);
  CHECK((same - psi).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(d);
  e1[1] = 1.0;
  const double t = 3.7;
  const Eigen::VectorXcd ev = evolve(model, e1, t, false);
  const cplx expected = std::exp(cplx{0.0, -model.energies[1] * t});
  CHECK(std::abs(ev[1] - expected) < 1e-12);

  Eigen::VectorXcd bad = psi * 2.0;
  CHECK_THROWS_AS(evolve(model, bad, 1.0, true), Error);
}

TEST_CASE("evolve: unitarity and group property") {
  const auto model = assemble(kParticle, test_bump(5e-3), small_truncation(),
                              kGrid);
  const Eigen::VectorXcd psi = random_superposition(model.dim(), 7);
  for (double t : {0.5, 4.0, 60.0, 500.0}) {
    const Eigen::VectorXcd out = evolve(model, psi, t, true);
    CHECK(std::abs(out.norm() - 1.0) <= 1e-10);
  }
  const Eigen::VectorXcd two_step =
      evolve(model, evolve(model, psi, 2.3, true), 1.9, true);
  const Eigen::VectorXcd one_step = evolve(model, psi, 4.2, true);
  CHECK((two_step - one_step).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("evolve: two-level Rabi transfer against the closed form") {
  // two degenerate states coupled by a parity-odd profile, so the diagonal
  // elements vanish by symmetry and V is strictly off-diagonal
  BasisTruncation tr;
  tr.nu_max = 0;
  tr.ml_min = 0;
  tr.ml_max = 1;
  tr.spin_down = false;
  const double eps = 0.02;
  PerturbationField odd;
  odd.epsilon = eps;
  odd.A0 = [](double x, double y) {
    return x * std::exp(-(x * x + y * y) / 8.0);
  };
  odd.min_scale = 2.0;
  const auto model = assemble(kParticle, odd, tr, kGrid);
  REQUIRE(model.dim() == 2);
  CHECK(std::abs(model.V(0, 0)) < 1e-12);
  CHECK(std::abs(model.V(1, 1)) < 1e-12);

  const cplx v01 = eps * model.V(0, 1);
  const double e1 = model.energies[0] + eps * model.V(0, 0).real();
  const double e2 = model.energies[1] + eps * model.V(1, 1).real();

  Eigen::VectorXcd start = Eigen::VectorXcd::Zero(2);
  start[0] = 1.0;

  const double t_rabi = M_PI / (2.0 * std::abs(v01));
  const Eigen::VectorXcd out = evolve(model, start, t_rabi, true);
  const Eigen::Vector2cd expected =
      oracle::two_level_evolve(e1, e2, v01, t_rabi, start.head<2>());
  CHECK(std::abs(out[0] - expected[0]) < 1e-10);
  CHECK(std::abs(out[1] - expected[1]) < 1e-10);
  // degenerate levels, off-diagonal coupling: complete population transfer
  CHECK(std::norm(out[1]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("echo_operator: identities and cross-path expectation") {
  const auto zero_model = assemble(kParticle, PerturbationField::zero(0.0),
                                   small_truncation(), kGrid);
  const auto id0 = echo_operator(zero_model, 2.5).matrix;
  CHECK((id0 - Eigen::MatrixXcd::Identity(id0.rows(), id0.cols()))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);

  const auto model = assemble(kParticle, test_bump(4e-3), small_truncation(),
                              kGrid);
  const auto at0 = echo_operator(model, 0.0).matrix;
  CHECK((at0 - Eigen::MatrixXcd::Identity(at0.rows(), at0.cols()))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);

  const double t = 11.0;
  const auto m = echo_operator(model, t).matrix;
  CHECK((m.adjoint() * m -
         Eigen::MatrixXcd::Identity(m.rows(), m.cols()))
            .cwiseAbs()
            .maxCoeff() <= 1e-8);

  const Eigen::VectorXcd psi = random_superposition(model.dim(), 99);
  const cplx via_echo = psi.dot(m * psi);
  const cplx via_evolutions =
      evolve(model, psi, t, true).dot(evolve(model, psi, t, false));
  CHECK(std::abs(via_echo - via_evolutions) <= 1e-10);
}

TEST_CASE("echo_kernel: contraction reproduces the operator expectation") {
  // smaller grid keeps the (4M)^2 kernel affordable
  TransverseGrid grid{9.0, 40};
  BasisTruncation tr;
  tr.nu_max = 0;
  tr.ml_min = 0;
  tr.ml_max = 2;
  tr.spin_down = false;
  const auto pert = PerturbationField::gaussian_scalar(3e-3, 1.0, 3.6, 1.0,
                                                       0.5);
  const auto model = assemble(kParticle, pert, tr, grid);

  // eps = 0 and t = 0 both reduce to the basis-projected identity
  const auto zero_model =
      assemble(kParticle, PerturbationField::zero(0.0), tr, grid);
  const auto k0 = echo_kernel(zero_model, 3.0);
  const auto kt0 = echo_kernel(model, 0.0);
  for (int j = 0; j < model.dim(); ++j) {
    const SpinorField bj = model.column_field(j);
    CHECK(std::abs(echo_kernel_contract(k0, bj, bj) - 1.0) <= 1e-6);
    CHECK(std::abs(echo_kernel_contract(kt0, bj, bj) - 1.0) <= 1e-6);
  }

  // two-state superposition, kernel route vs operator route
  const double t = 7.0;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(model.dim());
  c[0] = std::sqrt(0.4);
  c[1] = cplx{0.0, std::sqrt(0.6)};
  const SpinorField psi = model.reconstruct(c);
  const auto kern = echo_kernel(model, t);
  const cplx via_kernel = echo_kernel_contract(kern, psi, psi);
  const cplx via_operator = c.dot(echo_operator(model, t).matrix * c);
  CHECK(std::abs(via_kernel - via_operator) <= 1e-6);

  AssembleOptions tight;
  tight.memory_ceiling_bytes = 8 << 20;
  const auto clipped = assemble(kParticle, pert, tr, grid, tight);
  CHECK_THROWS_AS(echo_kernel(clipped, 1.0), Error);
}

TEST_CASE("assemble: covariant boost rescales the lowest-level block by"
          " 1/gamma") {
  BasisTruncation tr;
  tr.nu_max = 0;
  tr.ml_min = 0;
  tr.ml_max = 4;
  tr.spin_down = false;

  const auto pert = test_bump(1e-3);
  const auto rest = assemble(kParticle, pert, tr, kGrid);

  const double k = 2.0;  // kz = 2m
  ParticleParams moving = kParticle;
  moving.kz = k;
  const auto boosted = assemble(moving, pert, tr, kGrid);

  const double v = k / std::sqrt(k * k + 1.0);
  const double gamma = 1.0 / std::sqrt(1.0 - v * v);
  for (int i = 0; i < rest.dim(); ++i)
    for (int j = 0; j < rest.dim(); ++j)
      CHECK(std::abs(boosted.V(i, j) - rest.V(i, j) / gamma) <= 1e-10);

  // switching the covariant transform off leaves the scalar block unchanged
  auto fixed = pert;
  fixed.boost_with_kz = false;
  const auto lab = assemble(moving, fixed, tr, kGrid);
  for (int i = 0; i < rest.dim(); ++i)
    for (int j = 0; j < rest.dim(); ++j)
      CHECK(std::abs(lab.V(i, j) - rest.V(i, j)) <= 1e-10);
}
