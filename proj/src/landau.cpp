#include "relecho/landau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "relecho/kernels.hpp"

namespace relecho {

double landau_energy(const QuantumNumbers& qn, const ParticleParams& p) {
  qn.validate();
  p.validate();
  const int nu = effective_level(qn);
  const double e = std::sqrt(p.mass * p.mass + qn.kz * qn.kz +
                             2.0 * nu * p.field);
  return qn.energy_sign * e;
}

std::vector<QuantumNumbers> enumerate_basis(const BasisTruncation& t,
                                            double kz) {
  if (t.nu_max < 0 || t.ml_max < t.ml_min)
    throw Error(ErrorCode::Validation, "empty basis truncation");
  std::vector<QuantumNumbers> out;
  const std::vector<int> signs =
      t.negative_energies ? std::vector<int>{+1, -1} : std::vector<int>{+1};
  for (int sign : signs) {
    for (int nu = 0; nu <= t.nu_max; ++nu) {
      if (t.spin_up) {
        for (int ml = std::max(t.ml_min, -nu); ml <= t.ml_max; ++ml)
          out.push_back({nu, ml, +1, kz, sign});
      }
      if (t.spin_down && nu >= 1) {
        const int n = nu - 1;
        for (int ml = std::max(t.ml_min, -n); ml <= t.ml_max; ++ml)
          out.push_back({n, ml, -1, kz, sign});
      }
    }
  }
  if (out.empty())
    throw Error(ErrorCode::Validation, "basis truncation selects no states");
  if (static_cast<int>(out.size()) > t.dim_ceiling)
    throw Error(ErrorCode::TruncationTooLarge,
                "basis dimension " + std::to_string(out.size()) +
                    " exceeds ceiling " + std::to_string(t.dim_ceiling));
  return out;
}

std::vector<QuantumNumbers> degenerate_set(const QuantumNumbers& reference,
                                           const ParticleParams& p,
                                           const BasisTruncation& t,
                                           double tol) {
  if (!(tol >= 0.0))
    throw Error(ErrorCode::Validation, "degeneracy tolerance must be >= 0");
  const auto basis = enumerate_basis(t, reference.kz);
  const bool inside =
      std::find(basis.begin(), basis.end(), reference) != basis.end();
  if (!inside)
    throw Error(ErrorCode::EmptyTruncation,
                "truncation excludes the reference state " +
                    to_string(reference));
  const double e_ref = landau_energy(reference, p);
  std::vector<QuantumNumbers> out;
  for (const auto& qn : basis) {
    const double e = landau_energy(qn, p);
    if (std::abs(e - e_ref) <= tol * std::abs(e_ref)) out.push_back(qn);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbital construction.
//
// With w = x + iy and the Gaussian exp(-H w wbar / 4) factored out, the
// ladder operators act on the polynomial part P as
//   a      [P] = -i sqrt(2/H) d/dwbar P
//   a^dag  [P] = -i sqrt(2/H) (d/dw P - (H/2) wbar P)
//   b      [P] = -i sqrt(2/H) d/dw P
//   b^dag  [P] = -i sqrt(2/H) (d/dwbar P - (H/2) w P)
// a lowers the Landau level and raises ml; b moves the guiding center.
// phi_{n,m} = a^dag^n b^dag^(n+m) phi_00 / sqrt(n! (n+m)!), which makes
//   a   phi_{n,m} = sqrt(n)   phi_{n-1,m+1}
//   a^dag phi_{n,m} = sqrt(n+1) phi_{n+1,m-1}
// hold exactly, including phases.
// ---------------------------------------------------------------------------

namespace {

// Sparse polynomial in (w, wbar): (j, l) -> coefficient of w^j wbar^l.
using Poly = std::map<std::pair<int, int>, cplx>;

void add_term(Poly& p, int j, int l, cplx c) {
  if (c == cplx{0.0}) return;
  auto key = std::make_pair(j, l);
  auto it = p.find(key);
  if (it == p.end())
    p[key] = c;
  else {
    it->second += c;
    if (it->second == cplx{0.0}) p.erase(it);
  }
}

Poly ladder_raise_level(const Poly& p, double field) {
  // a^dag
  const cplx pref = cplx(0.0, -1.0) * std::sqrt(2.0 / field);
  Poly out;
  for (const auto& [jl, c] : p) {
    const auto [j, l] = jl;
    if (j >= 1) add_term(out, j - 1, l, pref * (double(j) * c));
    add_term(out, j, l + 1, pref * (-(field / 2.0) * c));
  }
  return out;
}

Poly ladder_raise_ml(const Poly& p, double field) {
  // b^dag
  const cplx pref = cplx(0.0, -1.0) * std::sqrt(2.0 / field);
  Poly out;
  for (const auto& [jl, c] : p) {
    const auto [j, l] = jl;
    if (l >= 1) add_term(out, j, l - 1, pref * (double(l) * c));
    add_term(out, j + 1, l, pref * (-(field / 2.0) * c));
  }
  return out;
}

void scale_poly(Poly& p, double s) {
  for (auto& [jl, c] : p) c *= s;
}

}  // namespace

LandauOrbital LandauOrbital::make(int level, int ml, double field) {
  if (level < 0 || ml < -level)
    throw Error(ErrorCode::Validation,
                "orbital (" + std::to_string(level) + ", " +
                    std::to_string(ml) + ") does not exist");
  Poly p;
  p[{0, 0}] = std::sqrt(field / (2.0 * M_PI));
  for (int k = 1; k <= level + ml; ++k) {
    p = ladder_raise_ml(p, field);
    scale_poly(p, 1.0 / std::sqrt(double(k)));
  }
  for (int k = 1; k <= level; ++k) {
    p = ladder_raise_level(p, field);
    scale_poly(p, 1.0 / std::sqrt(double(k)));
  }

  LandauOrbital orb;
  orb.level_ = level;
  orb.ml_ = ml;
  orb.field_ = field;
  const int n_radial = level - std::max(-ml, 0);  // radial node count
  orb.logmag_.assign(n_radial + 1,
                     -std::numeric_limits<double>::infinity());
  orb.phase_.assign(n_radial + 1, cplx{0.0});
  for (const auto& [jl, c] : p) {
    const auto [j, l] = jl;
    if (j - l != ml)
      throw Error(ErrorCode::Validation, "orbital polynomial lost its ml");
    const int k = std::min(j, l);
    const double mag = std::abs(c);
    orb.logmag_.at(k) = std::log(mag);
    orb.phase_.at(k) = c / mag;
  }
  return orb;
}

cplx LandauOrbital::eval(double x, double y) const {
  const double r2 = x * x + y * y;
  if (r2 == 0.0) {
    // only the constant radial term survives at the origin
    if (ml_ != 0 || logmag_.empty()) return cplx{0.0};
    return phase_[0] * std::exp(logmag_[0]);
  }
  const double log_r = 0.5 * std::log(r2);
  const double gauss = -field_ * r2 / 4.0;
  const int abs_m = std::abs(ml_);
  cplx radial{0.0};
  for (std::size_t k = 0; k < logmag_.size(); ++k) {
    if (phase_[k] == cplx{0.0}) continue;
    const double e = logmag_[k] + (abs_m + 2.0 * k) * log_r + gauss;
    radial += phase_[k] * std::exp(e);
  }
  const double theta = std::atan2(y, x);
  return radial * std::polar(1.0, ml_ * theta);
}

namespace {

void check_grid_vs_field(const TransverseGrid& grid, double field) {
  grid.validate();
  const double mag_len = 1.0 / std::sqrt(field);
  if (grid.extent < 6.0 * mag_len)
    throw Error(ErrorCode::GridTooSmall,
                "grid extent " + std::to_string(grid.extent) +
                    " is below 6 magnetic lengths (" +
                    std::to_string(6.0 * mag_len) + ")");
}

// Boundary amplitude must stay below 1e-6 of the peak.
void check_boundary_decay(const std::vector<cplx>& f,
                          const TransverseGrid& grid, const char* what) {
  const int n = grid.points;
  double peak = 0.0;
  for (const auto& v : f) peak = std::max(peak, std::abs(v));
  double edge = 0.0;
  for (int i = 0; i < n; ++i) {
    edge = std::max(edge, std::abs(f[grid.index(i, 0)]));
    edge = std::max(edge, std::abs(f[grid.index(i, n - 1)]));
    edge = std::max(edge, std::abs(f[grid.index(0, i)]));
    edge = std::max(edge, std::abs(f[grid.index(n - 1, i)]));
  }
  if (edge > 1e-6 * peak)
    throw Error(ErrorCode::GridTooSmall,
                std::string(what) +
                    ": boundary amplitude exceeds 1e-6 of the peak "
                    "(enlarge the grid)");
}

std::vector<cplx> sample_orbital(const LandauOrbital& orb,
                                 const TransverseGrid& grid) {
  std::vector<cplx> out(grid.nodes());
  for (int iy = 0; iy < grid.points; ++iy) {
    const double y = grid.coord(iy);
    for (int ix = 0; ix < grid.points; ++ix)
      out[grid.index(ix, iy)] = orb.eval(grid.coord(ix), y);
  }
  return out;
}

}  // namespace

std::vector<cplx> landau_orbital(int n, int ml, double field,
                                 const TransverseGrid& grid) {
  check_grid_vs_field(grid, field);
  const auto orb = LandauOrbital::make(n, ml, field);
  auto f = sample_orbital(orb, grid);
  check_boundary_decay(f, grid, "landau_orbital");
  return f;
}

double SpinorField::norm2() const {
  return kern::norm2(data.data(), data.size()) * grid.cell_area();
}

cplx dirac_inner(const SpinorField& a, const SpinorField& b) {
  require_same_grid(a.grid, b.grid, "dirac_inner");
  if (a.kz != b.kz)
    throw Error(ErrorCode::GridMismatch,
                "dirac_inner: fields carry different kz");
  return kern::cdotc(a.data.data(), b.data.data(), a.data.size()) *
         a.grid.cell_area();
}

SpinorField landau_spinor(const QuantumNumbers& qn, const ParticleParams& p,
                          const TransverseGrid& grid) {
  qn.validate();
  p.validate();
  check_grid_vs_field(grid, p.field);
  if (qn.kz != p.kz)
    throw Error(ErrorCode::Validation,
                "landau_spinor: quantum numbers and particle disagree on kz");

  const double E = std::abs(landau_energy(qn, p));
  const double m = p.mass;
  const double H = p.field;
  const double up = std::sqrt((E + m) / (2.0 * E));
  const double low = 1.0 / std::sqrt(2.0 * E * (E + m));

  // sigma.pi on the 2-spinor with exact ladder coefficients:
  //   (u_up, u_dn) -> (kz u_up + sqrt(2H) a^dag u_dn,
  //                    sqrt(2H) a u_up - kz u_dn)
  const auto main_orb = LandauOrbital::make(qn.n, qn.ml, H);
  auto main = sample_orbital(main_orb, grid);
  std::vector<cplx> partner;
  double partner_coeff = 0.0;
  if (qn.spin == +1) {
    if (qn.n >= 1) {
      partner = sample_orbital(LandauOrbital::make(qn.n - 1, qn.ml + 1, H),
                               grid);
      partner_coeff = std::sqrt(2.0 * H * qn.n);
    }
  } else {
    partner = sample_orbital(LandauOrbital::make(qn.n + 1, qn.ml - 1, H),
                             grid);
    partner_coeff = std::sqrt(2.0 * H * (qn.n + 1));
  }

  SpinorField psi;
  psi.grid = grid;
  psi.kz = qn.kz;
  psi.data.assign(grid.nodes() * 4, cplx{0.0});

  const bool positive = qn.energy_sign == +1;
  // positive energy: (up chi, low sigma.pi chi)
  // negative energy: (low sigma.pi chi, -up chi)
  for (std::size_t node = 0; node < grid.nodes(); ++node) {
    const cplx chi = main[node];
    cplx sp_up, sp_dn;  // sigma.pi chi, 2-spinor slots
    if (qn.spin == +1) {
      sp_up = qn.kz * chi;
      sp_dn = partner_coeff != 0.0 ? partner_coeff * partner[node] : cplx{0.0};
    } else {
      sp_up = partner_coeff * partner[node];
      sp_dn = -qn.kz * chi;
    }
    const int chi_slot = qn.spin == +1 ? 0 : 1;
    if (positive) {
      psi.at(node, chi_slot) = up * chi;
      psi.at(node, 2) = low * sp_up;
      psi.at(node, 3) = low * sp_dn;
    } else {
      psi.at(node, 0) = low * sp_up;
      psi.at(node, 1) = low * sp_dn;
      psi.at(node, 2 + chi_slot) = -up * chi;
    }
  }

  // reuse the scalar-field check on the dominant component
  check_boundary_decay(main, grid, "landau_spinor");
  return psi;
}

SpinorField apply_dirac_stencil(const SpinorField& psi,
                                const ParticleParams& p) {
  const TransverseGrid& g = psi.grid;
  const int n = g.points;
  const double m = p.mass;
  const double H = p.field;
  const double kz = psi.kz;
  const double c1 = 8.0 / (12.0 * g.spacing());
  const double c2 = -1.0 / (12.0 * g.spacing());
  const cplx I{0.0, 1.0};

  SpinorField out;
  out.grid = g;
  out.kz = kz;
  out.data.assign(psi.data.size(), cplx{0.0});

  auto comp = [&](int ix, int iy, int c) -> cplx {
    if (ix < 0 || ix >= n || iy < 0 || iy >= n) return cplx{0.0};
    return psi.at(g.index(ix, iy), c);
  };

  for (int iy = 0; iy < n; ++iy) {
    const double y = g.coord(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double x = g.coord(ix);
      const double ax = -H * y / 2.0;
      const double ay = H * x / 2.0;
      const std::size_t node = g.index(ix, iy);

      // 4th-order central differences, zero beyond the boundary
      cplx dx[4], dy[4], v[4];
      for (int c = 0; c < 4; ++c) {
        dx[c] = c1 * (comp(ix + 1, iy, c) - comp(ix - 1, iy, c)) +
                c2 * (comp(ix + 2, iy, c) - comp(ix - 2, iy, c));
        dy[c] = c1 * (comp(ix, iy + 1, c) - comp(ix, iy - 1, c)) +
                c2 * (comp(ix, iy + 2, c) - comp(ix, iy - 2, c));
        v[c] = psi.at(node, c);
      }
      // pi_x f = (-i d/dx - Ax) f, pi_y likewise
      cplx px[4], py[4];
      for (int c = 0; c < 4; ++c) {
        px[c] = -I * dx[c] - ax * v[c];
        py[c] = -I * dy[c] - ay * v[c];
      }
      // alpha_x pi_x + alpha_y pi_y + kz alpha_z + m beta
      out.at(node, 0) = px[3] - I * py[3] + kz * v[2] + m * v[0];
      out.at(node, 1) = px[2] + I * py[2] - kz * v[3] + m * v[1];
      out.at(node, 2) = px[1] - I * py[1] + kz * v[0] - m * v[2];
      out.at(node, 3) = px[0] + I * py[0] - kz * v[1] - m * v[3];
    }
  }
  return out;
}

double dirac_residual(const SpinorField& psi, const QuantumNumbers& qn,
                      const ParticleParams& p) {
  const double E = landau_energy(qn, p);
  SpinorField hpsi = apply_dirac_stencil(psi, p);
  kern::caxpy(cplx{-E, 0.0}, psi.data.data(), hpsi.data.data(),
              psi.data.size());
  return std::sqrt(kern::norm2(hpsi.data.data(), hpsi.data.size()) /
                   kern::norm2(psi.data.data(), psi.data.size()));
}

std::string to_string(const QuantumNumbers& qn) {
  std::ostringstream os;
  os << "(n=" << qn.n << ", ml=" << qn.ml << ", s=" << (qn.spin > 0 ? "+" : "-")
     << ", kz=" << qn.kz;
  if (qn.energy_sign < 0) os << ", E<0";
  os << ")";
  return os.str();
}

}  // namespace relecho
