#include "relecho/perturbation_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relecho {

double correlation_integral(const HamiltonianModel& model, int i, double t,
                            double deg_tol) {
  if (i < 0 || i >= model.dim())
    throw Error(ErrorCode::Validation, "state index outside the basis");
  const double ei = model.energies[i];
  double sum = 0.0;
  for (int j = 0; j < model.dim(); ++j) {
    if (j == i) continue;  // diagonal shifted to zero by convention
    const double w = std::norm(model.V(i, j));
    if (w == 0.0) continue;
    const double gap = ei - model.energies[j];
    if (std::abs(gap) <= deg_tol * std::max(std::abs(ei), 1.0)) {
      sum += w * t * t;  // exact limit of the sin^2 kernel
    } else {
      const double s = std::sin(gap * t / 2.0);
      sum += 4.0 * w * s * s / (gap * gap);
    }
  }
  return sum;
}

CorrelationCoefficient c_coefficient(const HamiltonianModel& model, int i,
                                     double deg_tol) {
  if (i < 0 || i >= model.dim())
    throw Error(ErrorCode::Validation, "state index outside the basis");
  CorrelationCoefficient out;
  const double ei = model.energies[i];
  out.smallest_gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < model.dim(); ++j) {
    if (j == i) continue;
    const double w = std::norm(model.V(i, j));
    const double gap = std::abs(ei - model.energies[j]);
    if (gap <= deg_tol * std::max(std::abs(ei), 1.0)) {
      out.degenerate_indices.push_back(j);
      out.contributions.push_back(w);
      out.C += w;
    } else {
      out.nondegenerate_weight += w;
      out.smallest_gap = std::min(out.smallest_gap, gap);
    }
  }
  if (!std::isfinite(out.smallest_gap)) out.smallest_gap = 0.0;
  return out;
}

void BeamEnsemble::validate(const HamiltonianModel& model,
                            double deg_tol) const {
  if (states.empty() || states.size() != weights.size())
    throw Error(ErrorCode::Validation,
                "beam ensemble needs matching states and weights");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0)
      throw Error(ErrorCode::WeightSumViolation,
                  "beam weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorCode::WeightSumViolation,
                "beam weights sum to " + std::to_string(sum) +
                    ", expected 1 within 1e-12");
  const double e0 = landau_energy(states.front(), model.particle);
  for (const auto& qn : states) {
    if (model.index_of(qn) < 0)
      throw Error(ErrorCode::Validation,
                  "beam state " + to_string(qn) + " is outside the basis");
    const double e = landau_energy(qn, model.particle);
    if (std::abs(e - e0) > deg_tol * std::abs(e0))
      throw Error(ErrorCode::Validation,
                  "beam states are not degenerate within tolerance");
  }
}

double beam_c(const BeamEnsemble& ensemble, const HamiltonianModel& model,
              double deg_tol) {
  ensemble.validate(model, deg_tol);
  double c = 0.0;
  for (std::size_t n = 0; n < ensemble.states.size(); ++n) {
    const int i = model.index_of(ensemble.states[n]);
    c += ensemble.weights[n] * c_coefficient(model, i, deg_tol).C;
  }
  return c;
}

double boost_velocity(double k, double m) {
  if (!(m > 0.0))
    throw Error(ErrorCode::Validation, "boost_velocity needs m > 0");
  return k / std::sqrt(k * k + m * m);
}

FidelitySeries predicted_series(double C, double eps, double k, double m,
                                const std::vector<double>& times) {
  if (C < 0.0)
    throw Error(ErrorCode::Validation, "C must be nonnegative");
  const double v = boost_velocity(k, m);
  const double rate = eps * eps * C * (1.0 - v * v);
  FidelitySeries s;
  s.method = Method::perturbative;
  s.t = times;
  s.f.resize(times.size());
  s.F.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t2 = times[i] * times[i];
    s.f[i] = 1.0 - rate * t2 / 2.0;
    s.F[i] = 1.0 - rate * t2;
  }
  return s;
}

QuadraticFit fit_quadratic_decay(const FidelitySeries& series,
                                 double window_lo, double window_hi) {
  QuadraticFit fit;
  fit.t_min = std::numeric_limits<double>::infinity();
  // least squares of y = intercept + coeff * x, x = t^2, y = 1 - F
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double y = 1.0 - series.F[i];
    if (y < window_lo || y > window_hi) continue;
    const double x = series.t[i] * series.t[i];
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.t_min = std::min(fit.t_min, series.t[i]);
    fit.t_max = std::max(fit.t_max, series.t[i]);
  }
  fit.points = static_cast<int>(pts.size());
  if (fit.points < 3)
    throw Error(ErrorCode::FitFailure,
                "quadratic fit window holds " + std::to_string(fit.points) +
                    " samples; series is not in the quadratic regime");
  const double n = fit.points;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw Error(ErrorCode::FitFailure, "degenerate fit abscissae");
  fit.coeff = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.coeff * sx) / n;
  double ss = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - fit.intercept - fit.coeff * x;
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

BoostCheckReport boost_check(const FidelitySeries& series_at_k,
                             const FidelitySeries& series_at_rest, double k,
                             double m, double tolerance) {
  BoostCheckReport r;
  r.k = k;
  r.m = m;
  r.v = boost_velocity(k, m);
  r.expected_ratio = 1.0 - r.v * r.v;
  r.fit_at_k = fit_quadratic_decay(series_at_k);
  r.fit_at_rest = fit_quadratic_decay(series_at_rest);
  if (r.fit_at_rest.coeff == 0.0)
    throw Error(ErrorCode::FitFailure, "rest series shows no decay");
  r.fitted_ratio = r.fit_at_k.coeff / r.fit_at_rest.coeff;
  r.rel_error = std::abs(r.fitted_ratio - r.expected_ratio) / r.expected_ratio;
  r.tolerance = tolerance;
  r.within_tolerance = r.rel_error <= tolerance;
  return r;
}

ComptonReport compton_guard(double k, double m,
                            std::optional<double> linear_density) {
  ComptonReport rep;
  const double ak = std::abs(k);
  if (ak > 2.0 * m) {
    rep.momentum_ok = false;
    rep.message = "pair-creation regime: k exceeds 2m";
  } else if (ak == 2.0 * m) {
    rep.momentum_ok = false;
    rep.boundary = true;
    rep.message = "boundary case: k equals the 2m Compton bound";
  }
  if (linear_density) {
    // mean spacing along the beam must stay above the Compton length 1/m
    if (*linear_density * (1.0 / m) >= 1.0) {
      rep.density_ok = false;
      if (!rep.message.empty()) rep.message += "; ";
      rep.message += "beam density too high for the single-particle picture";
    }
  }
  if (rep.message.empty()) rep.message = "within single-particle validity";
  return rep;
}

}  // namespace relecho
