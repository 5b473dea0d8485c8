#pragma once
#include <optional>
#include <string>
#include <vector>

#include "relecho/fidelity.hpp"
#include "relecho/model.hpp"

// Closed-form and semi-analytic predictions: the correlation double integral,
// the degenerate coefficient C, beam-ensemble averages, the quadratic decay
// law with its Lorentz suppression factor, and the validity guard for the
// single-particle regime.

namespace relecho {

// Closed-form value of the double time integral of the interaction-picture
// correlation <i| V~(t') V~(t'') |i>:
//   sum_j |V_ij|^2 * 4 sin^2((E_i - E_j) t / 2) / (E_i - E_j)^2,
// with the exact t^2 limit for partners degenerate within deg_tol. The
// diagonal element is assumed shifted to zero.
double correlation_integral(const HamiltonianModel& model, int i, double t,
                            double deg_tol = 1e-9);

struct CorrelationCoefficient {
  double C = 0.0;  // sum over the degenerate set of |V_ij|^2, energy^2 units
  std::vector<int> degenerate_indices;       // partners (diagonal excluded)
  std::vector<double> contributions;         // |V_ij|^2 per partner
  double nondegenerate_weight = 0.0;         // sum of |V_ij|^2 outside the set
  double smallest_gap = 0.0;                 // min |E_i - E_j| outside the set
};

// Degenerate-set coefficient driving the quadratic fidelity decay. An empty
// degenerate set is a valid outcome with C = 0.
CorrelationCoefficient c_coefficient(const HamiltonianModel& model, int i,
                                     double deg_tol = 1e-9);

struct BeamEnsemble {
  std::vector<QuantumNumbers> states;
  std::vector<double> weights;

  // weights nonnegative, summing to 1 within 1e-12; all states inside the
  // model basis and mutually degenerate within deg_tol.
  void validate(const HamiltonianModel& model, double deg_tol = 1e-9) const;
};

// Weighted average of per-state coefficients over the beam.
double beam_c(const BeamEnsemble& ensemble, const HamiltonianModel& model,
              double deg_tol = 1e-9);

// v(k) = k / sqrt(k^2 + m^2), in (-1, 1).
double boost_velocity(double k, double m);

// Quadratic short-time law with the (1 - v^2) suppression:
//   f(t) = 1 - eps^2 C (1 - v^2) t^2 / 2,  F(t) = 1 - eps^2 C (1 - v^2) t^2.
FidelitySeries predicted_series(double C, double eps, double k, double m,
                                const std::vector<double>& times);

// Affine-in-t^2 least squares of 1 - F(t) on the window where
// window_lo <= 1 - F <= window_hi. The intercept absorbs the time-averaged
// oscillatory offset; coeff is the t^2 coefficient.
struct QuadraticFit {
  double coeff = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double t_min = 0.0, t_max = 0.0;
  int points = 0;
};

QuadraticFit fit_quadratic_decay(const FidelitySeries& series,
                                 double window_lo = 1e-4,
                                 double window_hi = 1e-2);

struct BoostCheckReport {
  double k = 0.0, m = 0.0;
  double v = 0.0;
  double expected_ratio = 0.0;  // 1 - v^2
  double fitted_ratio = 0.0;
  double rel_error = 0.0;
  QuadraticFit fit_at_k, fit_at_rest;
  bool within_tolerance = false;
  double tolerance = 0.01;
};

// Fits both series and compares the decay-coefficient ratio against 1 - v^2.
BoostCheckReport boost_check(const FidelitySeries& series_at_k,
                             const FidelitySeries& series_at_rest, double k,
                             double m, double tolerance = 0.01);

struct ComptonReport {
  bool momentum_ok = true;   // k < 2m strictly
  bool boundary = false;     // k == 2m
  bool density_ok = true;
  std::string message;
};

// Flags scenarios outside the single-particle validity regime (k >= 2m, or
// beam spacing below the Compton length). Never blocks computation.
ComptonReport compton_guard(double k, double m,
                            std::optional<double> linear_density = {});

}  // namespace relecho
