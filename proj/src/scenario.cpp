#include "relecho/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "relecho/io.hpp"
#include "relecho/perturbation_theory.hpp"
#include "relecho/version.hpp"

namespace relecho {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  cfg.text = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorCode::Validation,
                    "config line " + std::to_string(lineno) +
                        ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Validation,
                  "config line " + std::to_string(lineno) +
                      ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorCode::Validation,
                  "config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.values[key] = val;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  return parse(io::read_text(path));
}

std::string Config::get_str(const std::string& key,
                            const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::string Config::require_str(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end())
    throw Error(ErrorCode::Validation, "missing config key '" + key + "'");
  return it->second;
}

double Config::get_num(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Validation,
                key + ": cannot parse '" + it->second + "' as a number");
  }
}

long Config::get_int(const std::string& key, long fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Validation,
                key + ": cannot parse '" + it->second + "' as an integer");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::Validation,
              key + ": cannot parse '" + v + "' as a boolean");
}

namespace {

QuantumNumbers parse_state_triple(const std::string& text, double kz) {
  // "(n, ml, spin)" with spin written as +1/-1
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](char c) { return c == '(' || c == ')' || c == ' '; }),
          s.end());
  const auto parts = split(s, ',');
  if (parts.size() != 3)
    throw Error(ErrorCode::Validation,
                "state '" + text + "' must be (n, ml, spin)");
  QuantumNumbers qn;
  qn.n = std::stoi(parts[0]);
  qn.ml = std::stoi(parts[1]);
  qn.spin = std::stoi(parts[2]);
  qn.kz = kz;
  return qn;
}

}  // namespace

Scenario Scenario::from_config(const Config& cfg) {
  if (cfg.get_str("units", "") != "natural")
    throw Error(ErrorCode::Validation,
                "config must declare 'units = natural' at top level");

  Scenario sc;
  sc.particle.mass = cfg.get_num("particle.mass", 1.0);
  sc.particle.field = cfg.get_num("particle.field", 1.0);
  sc.particle.kz = cfg.get_num("particle.kz", 0.0);

  sc.grid.extent = cfg.get_num("grid.extent", 10.0);
  sc.grid.points = static_cast<int>(cfg.get_int("grid.points", 128));

  sc.truncation.nu_max = static_cast<int>(cfg.get_int("truncation.nu_max", 2));
  sc.truncation.ml_min = static_cast<int>(cfg.get_int("truncation.ml_min", 0));
  sc.truncation.ml_max = static_cast<int>(cfg.get_int("truncation.ml_max", 8));
  sc.truncation.spin_up = cfg.get_bool("truncation.spin_up", true);
  sc.truncation.spin_down = cfg.get_bool("truncation.spin_down", true);
  sc.truncation.negative_energies =
      cfg.get_bool("truncation.negative_energies", false);
  sc.truncation.dim_ceiling =
      static_cast<int>(cfg.get_int("truncation.dim_ceiling", 4096));

  sc.profile = cfg.get_str("perturbation.profile", "none");
  sc.epsilon = cfg.get_num("perturbation.epsilon", 0.0);
  sc.amplitude = cfg.get_num("perturbation.amplitude", 1.0);
  sc.width = cfg.get_num("perturbation.width", 1.0);
  sc.center_x = cfg.get_num("perturbation.center_x", 0.0);
  sc.center_y = cfg.get_num("perturbation.center_y", 0.0);
  sc.value = cfg.get_num("perturbation.value", 0.0);
  sc.table_path = cfg.get_str("perturbation.table", "");
  sc.boost_with_kz = cfg.get_bool("perturbation.boost_with_kz", true);
  sc.zero_diagonal = cfg.get_bool("perturbation.zero_diagonal", true);

  const std::string kind = cfg.get_str("initial.kind", "state");
  if (kind == "state") {
    sc.initial.kind = InitialSpec::Kind::state;
    sc.initial.state.n = static_cast<int>(cfg.get_int("initial.n", 0));
    sc.initial.state.ml = static_cast<int>(cfg.get_int("initial.ml", 0));
    sc.initial.state.spin = static_cast<int>(cfg.get_int("initial.spin", 1));
    sc.initial.state.kz = sc.particle.kz;
  } else if (kind == "random") {
    sc.initial.kind = InitialSpec::Kind::random;
  } else if (kind == "beam") {
    sc.initial.kind = InitialSpec::Kind::beam;
    const auto states = split(cfg.require_str("initial.beam_states"), ';');
    for (const auto& s : states)
      if (!s.empty())
        sc.initial.beam_states.push_back(parse_state_triple(s, sc.particle.kz));
    for (const auto& w : split(cfg.require_str("initial.beam_weights"), ','))
      if (!w.empty()) sc.initial.beam_weights.push_back(std::stod(w));
  } else {
    throw Error(ErrorCode::Validation,
                "initial.kind must be state, random or beam");
  }
  sc.initial.seed =
      static_cast<std::uint64_t>(cfg.get_int("initial.seed", 1));

  sc.t_max = cfg.get_num("time.t_max", 10.0);
  sc.samples = static_cast<int>(cfg.get_int("time.samples", 101));

  sc.method_overlap = cfg.get_bool("methods.overlap", true);
  sc.method_current = cfg.get_bool("methods.current", false);
  sc.method_ode = cfg.get_bool("methods.ode", false);
  sc.method_perturbative = cfg.get_bool("methods.perturbative", false);

  sc.fit_window_lo = cfg.get_num("fit.window_lo", 1e-4);
  sc.fit_window_hi = cfg.get_num("fit.window_hi", 1e-2);
  sc.ode_substeps = static_cast<int>(cfg.get_int("ode.substeps", 16));
  sc.ode_boundary_threshold = cfg.get_num("ode.boundary_threshold", 1e-8);
  sc.degeneracy_tol = cfg.get_num("truncation.degeneracy_tol", 1e-9);
  sc.memory_ceiling = static_cast<std::size_t>(
      cfg.get_num("limits.memory_ceiling_mib", 3072.0) * (1 << 20));

  if (cfg.has("kg.points") || cfg.has("kg.t_max") || cfg.has("kg.modes")) {
    sc.kg.present = true;
    sc.kg.points = static_cast<int>(cfg.get_int("kg.points", 256));
    sc.kg.length = cfg.get_num("kg.length", 32.0);
    sc.kg.mass = cfg.get_num("kg.mass", 1.0);
    sc.kg.epsilon = cfg.get_num("kg.epsilon", 0.0);
    sc.kg.profile = cfg.get_str("kg.profile", "none");
    sc.kg.amplitude = cfg.get_num("kg.amplitude", 1.0);
    sc.kg.width = cfg.get_num("kg.width", 2.0);
    sc.kg.center = cfg.get_num("kg.center", sc.kg.length / 2.0);
    sc.kg.value = cfg.get_num("kg.value", 0.0);
    sc.kg.dt = cfg.get_num("kg.dt", 0.0);
    sc.kg.t_max = cfg.get_num("kg.t_max", 10.0);
    sc.kg.samples = static_cast<int>(cfg.get_int("kg.samples", 41));
    sc.kg.check_kernel = cfg.get_bool("kg.check_kernel", true);
    for (const auto& m : split(cfg.get_str("kg.modes", "1"), ','))
      if (!m.empty()) sc.kg.modes.push_back(std::stoi(m));
    for (const auto& w : split(cfg.get_str("kg.mode_weights", ""), ','))
      if (!w.empty()) sc.kg.mode_weights.push_back(std::stod(w));
  }
  return sc;
}

PerturbationField Scenario::make_field() const {
  PerturbationField f;
  if (profile == "none") {
    f = PerturbationField::zero(epsilon);
  } else if (profile == "constant") {
    f = PerturbationField::constant_scalar(epsilon, value);
  } else if (profile == "gaussian_scalar") {
    f = PerturbationField::gaussian_scalar(epsilon, amplitude, width, center_x,
                                           center_y);
  } else if (profile == "gaussian_vector") {
    f = PerturbationField::gaussian_vector(epsilon, amplitude, width, center_x,
                                           center_y);
  } else if (profile == "tabulated") {
    std::vector<double> a0;
    for (const auto& tok : split(io::read_text(table_path), ','))
      if (!tok.empty()) a0.push_back(std::stod(tok));
    f = PerturbationField::tabulated(epsilon, grid, std::move(a0));
  } else {
    throw Error(ErrorCode::Validation,
                "perturbation.profile '" + profile + "' is not known");
  }
  f.boost_with_kz = boost_with_kz;
  return f;
}

std::vector<double> Scenario::times() const {
  std::vector<double> t(samples);
  for (int k = 0; k < samples; ++k) t[k] = t_max * k / double(samples - 1);
  return t;
}

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  check(particle.mass > 0.0, "particle.mass: must be positive");
  check(particle.field > 0.0, "particle.field: must be positive");
  check(std::isfinite(particle.kz), "particle.kz: must be finite");
  check(grid.points >= 16 && grid.points % 2 == 0,
        "grid.points: must be even and >= 16");
  if (particle.field > 0.0)
    check(grid.extent >= 6.0 / std::sqrt(particle.field),
          "grid.extent: below 6 magnetic lengths, bound orbitals would touch "
          "the boundary");
  check(truncation.nu_max >= 0, "truncation.nu_max: must be >= 0");
  check(truncation.ml_max >= truncation.ml_min,
        "truncation.ml_max: range is empty");
  check(truncation.spin_up || truncation.spin_down,
        "truncation: at least one spin branch required");
  const bool known_profile =
      profile == "none" || profile == "constant" ||
      profile == "gaussian_scalar" || profile == "gaussian_vector" ||
      profile == "tabulated";
  check(known_profile, "perturbation.profile: unknown profile '" + profile + "'");
  check(std::isfinite(epsilon), "perturbation.epsilon: must be finite");
  if ((profile == "gaussian_scalar" || profile == "gaussian_vector")) {
    check(width > 0.0, "perturbation.width: must be positive");
    if (width > 0.0 && grid.points > 0)
      check(grid.spacing() <= width / 8.0,
            "grid.points: perturbation width resolved with fewer than 8 "
            "points");
  }
  if (initial.kind == InitialSpec::Kind::state) {
    try {
      initial.state.validate();
      const auto basis = enumerate_basis(truncation, particle.kz);
      check(std::find(basis.begin(), basis.end(), initial.state) != basis.end(),
            "initial: state " + to_string(initial.state) +
                " is outside the truncation");
    } catch (const Error& e) {
      bad.push_back(std::string("initial: ") + e.what());
    }
  } else if (initial.kind == InitialSpec::Kind::beam) {
    check(!initial.beam_states.empty(), "initial.beam_states: empty");
    check(initial.beam_states.size() == initial.beam_weights.size(),
          "initial.beam_weights: count differs from beam_states");
    double sum = 0.0;
    bool nonneg = true;
    for (double w : initial.beam_weights) {
      sum += w;
      nonneg = nonneg && w >= 0.0;
    }
    check(nonneg, "initial.beam_weights: must be nonnegative");
    if (!initial.beam_weights.empty())
      check(std::abs(sum - 1.0) <= 1e-12,
            "initial.beam_weights: must sum to 1 within 1e-12");
  }
  check(t_max > 0.0, "time.t_max: must be positive");
  check(samples >= 2, "time.samples: must be >= 2");
  check(fit_window_lo > 0.0 && fit_window_lo < fit_window_hi &&
            fit_window_hi < 1.0,
        "fit.window: need 0 < lo < hi < 1");
  check(ode_substeps >= 1, "ode.substeps: must be >= 1");
  if (kg.present) {
    check(kg.points >= 8 && kg.points % 2 == 0,
          "kg.points: must be even and >= 8");
    check(kg.length > 0.0, "kg.length: must be positive");
    check(kg.mass > 0.0, "kg.mass: must be positive");
    check(kg.t_max > 0.0, "kg.t_max: must be positive");
    check(kg.samples >= 2, "kg.samples: must be >= 2");
    check(!kg.modes.empty(), "kg.modes: at least one mode required");
    for (int m : kg.modes)
      check(m >= 0 && m < kg.points, "kg.modes: mode index outside the grid");
    const bool kg_known = kg.profile == "none" || kg.profile == "constant" ||
                          kg.profile == "gaussian";
    check(kg_known, "kg.profile: unknown profile '" + kg.profile + "'");
    if (!kg.mode_weights.empty())
      check(kg.mode_weights.size() == kg.modes.size(),
            "kg.mode_weights: count differs from kg.modes");
  }
  return bad;
}

Eigen::VectorXcd random_superposition(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = cplx{gauss(rng), gauss(rng)};
  v /= v.norm();
  return v;
}

// ---------------------------------------------------------------------------
// pipelines
// ---------------------------------------------------------------------------

namespace {

void apply_threads(const RunOptions& opts) {
#ifdef _OPENMP
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
#else
  (void)opts;
#endif
}

void ensure_valid(const Scenario& sc) {
  const auto bad = sc.validate();
  if (!bad.empty()) {
    std::string msg = "scenario validation failed:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw Error(ErrorCode::Validation, msg);
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

struct ManifestWriter {
  const Config& cfg;
  const RunOptions& opts;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void write(const std::string& subcommand, RunOutcome& outcome,
             std::uint64_t seed) const {
    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("tool", "relecho");
    rows.emplace_back("version", version_string());
    rows.emplace_back("subcommand", subcommand);
    rows.emplace_back("config_hash", io::hex64(io::fnv1a64(cfg.text)));
    rows.emplace_back("seed", std::to_string(seed));
    rows.emplace_back("threads", std::to_string(opts.threads));
    rows.emplace_back("wall_ms", std::to_string(wall));
    for (const auto& o : outcome.outputs) rows.emplace_back("output", o);
    for (const auto& w : outcome.warnings) rows.emplace_back("warning", w);
    const std::string path = join_path(opts.out_dir, "run_manifest.txt");
    io::write_kv(path, rows);
    outcome.outputs.push_back(path);
  }
};

struct DiracRun {
  HamiltonianModel model;
  std::vector<Eigen::VectorXcd> initial_states;  // one, or beam members
  std::vector<double> weights;                   // matching weights
  int reference_index = -1;  // basis index of the labeled initial state
  std::uint64_t seed = 1;
};

DiracRun prepare_dirac(const Scenario& sc, const RunOptions& opts) {
  DiracRun run;
  run.seed = opts.seed.value_or(sc.initial.seed);

  AssembleOptions aopts;
  aopts.memory_ceiling_bytes = sc.memory_ceiling;

  // locate the reference state first so the diagonal shift can target it
  const auto basis = enumerate_basis(sc.truncation, sc.particle.kz);
  auto find_index = [&](const QuantumNumbers& qn) {
    const auto it = std::find(basis.begin(), basis.end(), qn);
    return it == basis.end() ? -1 : static_cast<int>(it - basis.begin());
  };
  if (sc.initial.kind == InitialSpec::Kind::state)
    run.reference_index = find_index(sc.initial.state);
  else if (sc.initial.kind == InitialSpec::Kind::beam)
    run.reference_index = find_index(sc.initial.beam_states.front());
  if (sc.zero_diagonal && run.reference_index >= 0 && sc.epsilon != 0.0)
    aopts.zero_diagonal_index = run.reference_index;

  run.model =
      assemble(sc.particle, sc.make_field(), sc.truncation, sc.grid, aopts);

  const int d = run.model.dim();
  if (sc.initial.kind == InitialSpec::Kind::state) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(d);
    c[run.reference_index] = 1.0;
    run.initial_states.push_back(std::move(c));
    run.weights.push_back(1.0);
  } else if (sc.initial.kind == InitialSpec::Kind::random) {
    run.initial_states.push_back(random_superposition(d, run.seed));
    run.weights.push_back(1.0);
  } else {
    for (const auto& qn : sc.initial.beam_states) {
      const int idx = run.model.index_of(qn);
      if (idx < 0)
        throw Error(ErrorCode::Validation,
                    "beam state " + to_string(qn) + " outside the basis");
      Eigen::VectorXcd c = Eigen::VectorXcd::Zero(d);
      c[idx] = 1.0;
      run.initial_states.push_back(std::move(c));
    }
    run.weights = sc.initial.beam_weights;
  }
  return run;
}

// Weighted ensemble series: F is the weighted mean of member fidelities, f
// the weighted mean amplitude.
FidelitySeries ensemble_series(
    const DiracRun& run, const std::vector<double>& times, Method method,
    const Scenario& sc, double* max_boundary_flux = nullptr) {
  FidelitySeries total;
  total.method = method;
  total.t = times;
  total.f.assign(times.size(), cplx{0.0});
  total.F.assign(times.size(), 0.0);
  for (std::size_t n = 0; n < run.initial_states.size(); ++n) {
    FidelitySeries s;
    if (method == Method::overlap) {
      s = fidelity_overlap(run.model, run.initial_states[n], times);
    } else if (method == Method::current) {
      s = fidelity_current(run.model, run.initial_states[n], times);
    } else {
      OdeOptions oo;
      oo.substeps = sc.ode_substeps;
      oo.boundary_threshold = sc.ode_boundary_threshold;
      OdeResult r = fidelity_ode(run.model, run.initial_states[n], times, oo);
      if (max_boundary_flux)
        *max_boundary_flux = std::max(*max_boundary_flux, r.max_boundary_flux);
      s = std::move(r.series);
    }
    const double w = run.weights[n];
    for (std::size_t k = 0; k < times.size(); ++k) {
      total.f[k] += w * s.f[k];
      total.F[k] += w * s.F[k];
    }
  }
  return total;
}

void emit_prediction_and_fit(const Scenario& sc, const DiracRun& run,
                             const FidelitySeries* fitted_series,
                             const RunOptions& opts, RunOutcome& outcome) {
  const double kz = sc.particle.kz;
  const double m = sc.particle.mass;
  const double v = boost_velocity(kz, m);

  // direct route: degenerate coefficient of the assembled model at this kz
  double c_direct = 0.0;
  if (run.reference_index >= 0) {
    if (sc.initial.kind == InitialSpec::Kind::beam) {
      BeamEnsemble ens{sc.initial.beam_states, sc.initial.beam_weights};
      c_direct = beam_c(ens, run.model, sc.degeneracy_tol);
    } else {
      c_direct =
          c_coefficient(run.model, run.reference_index, sc.degeneracy_tol).C;
    }
  }

  // boost route: rest-frame coefficient times the suppression factor
  double c_rest = c_direct;
  if (kz != 0.0 && run.reference_index >= 0) {
    Scenario rest = sc;
    rest.particle.kz = 0.0;
    rest.initial.state.kz = 0.0;
    for (auto& qn : rest.initial.beam_states) qn.kz = 0.0;
    const RunOptions quiet = opts;
    DiracRun rest_run = prepare_dirac(rest, quiet);
    if (rest.initial.kind == InitialSpec::Kind::beam) {
      BeamEnsemble ens{rest.initial.beam_states, rest.initial.beam_weights};
      c_rest = beam_c(ens, rest_run.model, rest.degeneracy_tol);
    } else {
      c_rest = c_coefficient(rest_run.model, rest_run.reference_index,
                             rest.degeneracy_tol)
                   .C;
    }
  }

  const auto times = sc.times();
  const FidelitySeries prediction =
      predicted_series(c_rest, sc.epsilon, kz, m, times);
  const std::string ppath = join_path(opts.out_dir, "prediction.csv");
  io::write_series_csv(ppath, prediction);
  outcome.outputs.push_back(ppath);

  // per-partner breakdown for the labeled reference state
  if (run.reference_index >= 0 &&
      sc.initial.kind != InitialSpec::Kind::random) {
    const auto cc =
        c_coefficient(run.model, run.reference_index, sc.degeneracy_tol);
    std::ostringstream os;
    os << "partner_index,n,ml,spin,contribution\n";
    for (std::size_t p = 0; p < cc.degenerate_indices.size(); ++p) {
      const auto& qn = run.model.basis[cc.degenerate_indices[p]];
      os << cc.degenerate_indices[p] << ',' << qn.n << ',' << qn.ml << ','
         << qn.spin << ',' << io::format_sci(cc.contributions[p]) << '\n';
    }
    const std::string cpath = join_path(opts.out_dir, "c_breakdown.csv");
    io::write_text(cpath, os.str());
    outcome.outputs.push_back(cpath);
  }

  std::ostringstream rep;
  rep << "name,value\n";
  rep << "epsilon," << io::format_sci(sc.epsilon) << '\n';
  rep << "kz," << io::format_sci(kz) << '\n';
  rep << "boost_velocity," << io::format_sci(v) << '\n';
  rep << "suppression_factor," << io::format_sci(1.0 - v * v) << '\n';
  rep << "c_direct," << io::format_sci(c_direct) << '\n';
  rep << "c_rest_frame," << io::format_sci(c_rest) << '\n';
  rep << "predicted_coeff,"
      << io::format_sci(sc.epsilon * sc.epsilon * c_rest * (1.0 - v * v))
      << '\n';

  const auto guard = compton_guard(kz, m);
  rep << "compton_ok," << (guard.momentum_ok ? "true" : "false") << '\n';
  rep << "compton_message," << guard.message << '\n';
  if (!guard.momentum_ok) outcome.warnings.push_back(guard.message);

  if (fitted_series) {
    try {
      const QuadraticFit fit = fit_quadratic_decay(
          *fitted_series, sc.fit_window_lo, sc.fit_window_hi);
      const double predicted =
          sc.epsilon * sc.epsilon * c_rest * (1.0 - v * v);
      rep << "fit_method," << method_name(fitted_series->method) << '\n';
      rep << "fit_coeff," << io::format_sci(fit.coeff) << '\n';
      rep << "fit_intercept," << io::format_sci(fit.intercept) << '\n';
      rep << "fit_residual_rms," << io::format_sci(fit.residual_rms) << '\n';
      rep << "fit_t_min," << io::format_sci(fit.t_min) << '\n';
      rep << "fit_t_max," << io::format_sci(fit.t_max) << '\n';
      rep << "fit_points," << fit.points << '\n';
      if (predicted != 0.0)
        rep << "fit_over_predicted," << io::format_sci(fit.coeff / predicted)
            << '\n';
    } catch (const Error& e) {
      rep << "fit_error," << e.what() << '\n';
      outcome.warnings.push_back(std::string("fit: ") + e.what());
    }
  }

  const std::string rpath = join_path(opts.out_dir, "fit_report.csv");
  io::write_text(rpath, rep.str());
  outcome.outputs.push_back(rpath);
}

void handle_warnings(const RunOptions& opts, const RunOutcome& outcome) {
  if (opts.strict && !outcome.warnings.empty()) {
    std::string msg = "strict mode: warnings are errors:";
    for (const auto& w : outcome.warnings) msg += "\n  " + w;
    throw Error(ErrorCode::BoundaryFluxTooLarge, msg);
  }
}

}  // namespace

RunOutcome run_spectrum(const Scenario& sc, const Config& cfg,
                        const RunOptions& opts) {
  ensure_valid(sc);
  apply_threads(opts);
  ManifestWriter manifest{cfg, opts};
  std::filesystem::create_directories(opts.out_dir);

  const auto basis = enumerate_basis(sc.truncation, sc.particle.kz);
  // group by effective level and energy sign
  std::map<std::pair<int, int>, std::vector<const QuantumNumbers*>> levels;
  for (const auto& qn : basis)
    levels[{qn.energy_sign, effective_level(qn)}].push_back(&qn);

  std::ostringstream os;
  os << "nu,energy,count,states\n";
  for (const auto& [key, states] : levels) {
    const double e = landau_energy(*states.front(), sc.particle);
    os << key.second << ',' << io::format_sci(e) << ',' << states.size()
       << ',';
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (i) os << ';';
      os << '(' << states[i]->n << ' ' << states[i]->ml << ' '
         << states[i]->spin << ')';
    }
    os << '\n';
  }

  RunOutcome outcome;
  const std::string path = join_path(opts.out_dir, "spectrum.csv");
  io::write_text(path, os.str());
  outcome.outputs.push_back(path);
  manifest.write("spectrum", outcome, opts.seed.value_or(sc.initial.seed));
  handle_warnings(opts, outcome);
  return outcome;
}

RunOutcome run_evolve(const Scenario& sc, const Config& cfg,
                      const RunOptions& opts) {
  ensure_valid(sc);
  apply_threads(opts);
  ManifestWriter manifest{cfg, opts};
  std::filesystem::create_directories(opts.out_dir);

  RunOutcome outcome;
  DiracRun run = prepare_dirac(sc, opts);
  const auto times = sc.times();

  auto emit = [&](Method method) {
    double flux = 0.0;
    const FidelitySeries s = ensemble_series(run, times, method, sc, &flux);
    const std::string path = join_path(
        opts.out_dir, std::string("fidelity_") + method_name(method) + ".csv");
    io::write_series_csv(path, s);
    outcome.outputs.push_back(path);
    if (method == Method::ode && flux > sc.ode_boundary_threshold / 10.0)
      outcome.warnings.push_back("ode boundary flux reached " +
                                 io::format_sci(flux));
  };
  if (sc.method_overlap) emit(Method::overlap);
  if (sc.method_current) emit(Method::current);
  if (sc.method_ode) emit(Method::ode);

  manifest.write("evolve", outcome, run.seed);
  handle_warnings(opts, outcome);
  return outcome;
}

RunOutcome run_perturbative(const Scenario& sc, const Config& cfg,
                            const RunOptions& opts) {
  ensure_valid(sc);
  apply_threads(opts);
  ManifestWriter manifest{cfg, opts};
  std::filesystem::create_directories(opts.out_dir);

  RunOutcome outcome;
  DiracRun run = prepare_dirac(sc, opts);
  const auto times = sc.times();
  const FidelitySeries overlap =
      ensemble_series(run, times, Method::overlap, sc);
  emit_prediction_and_fit(sc, run, &overlap, opts, outcome);

  manifest.write("perturbative", outcome, run.seed);
  handle_warnings(opts, outcome);
  return outcome;
}

RunOutcome run_kg(const Scenario& sc, const Config& cfg,
                  const RunOptions& opts) {
  if (!sc.kg.present)
    throw Error(ErrorCode::Validation, "config has no [kg] section");
  ensure_valid(sc);
  apply_threads(opts);
  ManifestWriter manifest{cfg, opts};
  std::filesystem::create_directories(opts.out_dir);

  const KgSpec& ks = sc.kg;
  kg::Grid1D grid{ks.points, ks.length};
  kg::Perturbation pert;
  pert.epsilon = ks.epsilon;
  if (ks.profile == "constant")
    pert = kg::Perturbation::constant(ks.epsilon, ks.value);
  else if (ks.profile == "gaussian")
    pert = kg::Perturbation::gaussian(ks.epsilon, ks.amplitude, ks.width,
                                      ks.center);

  std::vector<cplx> coeffs(grid.n, cplx{0.0});
  for (std::size_t i = 0; i < ks.modes.size(); ++i) {
    const double w =
        ks.mode_weights.empty() ? 1.0 : ks.mode_weights[i];
    coeffs[ks.modes[i]] = w;
  }
  const kg::State initial = kg::make_packet(grid, coeffs, ks.mass);

  std::vector<double> times(ks.samples);
  for (int k = 0; k < ks.samples; ++k)
    times[k] = ks.t_max * k / double(ks.samples - 1);

  std::ostringstream direct_csv, kernel_csv;
  direct_csv << "t,re_f,im_f,F,method\n";
  if (ks.check_kernel) kernel_csv << "t,re_f,im_f,F,method\n";

  kg::State state = initial;
  kg::State free_state = initial;
  double prev_t = 0.0;
  kg::EvolveOptions eopts;
  eopts.dt = ks.dt;
  const kg::Perturbation free{0.0, pert.A0};
  for (double t : times) {
    const double step = t - prev_t;
    if (step > 0.0) {
      state = kg::evolve(state, step, ks.mass, pert, eopts);
      free_state = kg::evolve(free_state, step, ks.mass, free, eopts);
      prev_t = t;
    }
    const cplx f = kg::inner(state, free_state);
    direct_csv << io::format_sci(t) << ',' << io::format_sci(f.real()) << ','
               << io::format_sci(f.imag()) << ',' << io::format_sci(std::norm(f))
               << ",kg_direct\n";
    if (ks.check_kernel) {
      const auto kern =
          kg::echo_kernel(grid, t, ks.mass, pert, sc.memory_ceiling);
      const cplx fk = kg::kernel_contract(kern, initial);
      kernel_csv << io::format_sci(t) << ',' << io::format_sci(fk.real())
                 << ',' << io::format_sci(fk.imag()) << ','
                 << io::format_sci(std::norm(fk)) << ",kg_kernel\n";
    }
  }

  RunOutcome outcome;
  const std::string dpath = join_path(opts.out_dir, "kg_fidelity.csv");
  io::write_text(dpath, direct_csv.str());
  outcome.outputs.push_back(dpath);
  if (ks.check_kernel) {
    const std::string kpath = join_path(opts.out_dir, "kg_kernel.csv");
    io::write_text(kpath, kernel_csv.str());
    outcome.outputs.push_back(kpath);
  }
  manifest.write("kg", outcome, opts.seed.value_or(sc.initial.seed));
  handle_warnings(opts, outcome);
  return outcome;
}

RunOutcome run_scenario(const Scenario& sc, const Config& cfg,
                        const RunOptions& opts) {
  ensure_valid(sc);
  apply_threads(opts);
  ManifestWriter manifest{cfg, opts};
  std::filesystem::create_directories(opts.out_dir);

  RunOutcome outcome;
  DiracRun run = prepare_dirac(sc, opts);
  const auto times = sc.times();

  FidelitySeries overlap;
  bool have_overlap = false;
  auto emit = [&](Method method) {
    double flux = 0.0;
    FidelitySeries s = ensemble_series(run, times, method, sc, &flux);
    const std::string path = join_path(
        opts.out_dir, std::string("fidelity_") + method_name(method) + ".csv");
    io::write_series_csv(path, s);
    outcome.outputs.push_back(path);
    if (method == Method::overlap) {
      overlap = std::move(s);
      have_overlap = true;
    }
  };
  if (sc.method_overlap) emit(Method::overlap);
  if (sc.method_current) emit(Method::current);
  if (sc.method_ode) emit(Method::ode);

  if (sc.method_perturbative)
    emit_prediction_and_fit(sc, run, have_overlap ? &overlap : nullptr, opts,
                            outcome);

  if (sc.kg.present) {
    const RunOutcome kgout = run_kg(sc, cfg, opts);
    outcome.outputs.insert(outcome.outputs.end(), kgout.outputs.begin(),
                           kgout.outputs.end());
  }

  manifest.write("run", outcome, run.seed);
  handle_warnings(opts, outcome);
  return outcome;
}

}  // namespace relecho
