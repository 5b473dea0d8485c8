#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relecho/kg.hpp"
#include "relecho/model.hpp"

// Batch front end: flat key-value scenario configs with sections per module,
// field-level validation, deterministic pipelines and byte-stable exports.
// No physics formulas live here; everything delegates to the library.

namespace relecho {

// INI-style parser: [section] headers, key = value lines, '#'/';' comments.
// Keys are stored as "section.key" ("key" alone before any section).
struct Config {
  std::map<std::string, std::string> values;
  std::string text;  // original bytes, hashed into the run manifest

  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get_str(const std::string& key,
                      const std::string& fallback) const;
  std::string require_str(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
};

struct InitialSpec {
  enum class Kind { state, random, beam };
  Kind kind = Kind::state;
  QuantumNumbers state;
  std::uint64_t seed = 1;
  std::vector<QuantumNumbers> beam_states;
  std::vector<double> beam_weights;
};

struct KgSpec {
  bool present = false;
  int points = 256;
  double length = 32.0;
  double mass = 1.0;
  double epsilon = 0.0;
  std::string profile = "none";  // none | constant | gaussian
  double amplitude = 1.0;
  double width = 2.0;
  double center = 0.0;
  double value = 0.0;
  double dt = 0.0;  // 0 = automatic
  std::vector<int> modes;
  std::vector<double> mode_weights;
  double t_max = 10.0;
  int samples = 41;
  bool check_kernel = true;
};

struct Scenario {
  ParticleParams particle;
  TransverseGrid grid;
  BasisTruncation truncation;

  std::string profile = "none";  // none|constant|gaussian_scalar|gaussian_vector|tabulated
  double epsilon = 0.0;
  double amplitude = 1.0;
  double width = 1.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double value = 0.0;
  std::string table_path;
  bool boost_with_kz = true;
  bool zero_diagonal = true;

  InitialSpec initial;

  double t_max = 10.0;
  int samples = 101;

  bool method_overlap = true;
  bool method_current = false;
  bool method_ode = false;
  bool method_perturbative = false;

  double fit_window_lo = 1e-4;
  double fit_window_hi = 1e-2;
  int ode_substeps = 16;
  double ode_boundary_threshold = 1e-8;
  double degeneracy_tol = 1e-9;
  std::size_t memory_ceiling = std::size_t(3) << 30;

  KgSpec kg;

  static Scenario from_config(const Config& cfg);
  // Field-level messages; empty when the scenario is runnable.
  std::vector<std::string> validate() const;

  PerturbationField make_field() const;
  std::vector<double> times() const;
};

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides initial.seed
  int threads = 0;
  bool strict = false;
};

struct RunOutcome {
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

// Pipelines behind the CLI subcommands. All of them validate first and throw
// Error(Validation) listing the violated invariants.
RunOutcome run_scenario(const Scenario& sc, const Config& cfg,
                        const RunOptions& opts);
RunOutcome run_spectrum(const Scenario& sc, const Config& cfg,
                        const RunOptions& opts);
RunOutcome run_evolve(const Scenario& sc, const Config& cfg,
                      const RunOptions& opts);
RunOutcome run_perturbative(const Scenario& sc, const Config& cfg,
                            const RunOptions& opts);
RunOutcome run_kg(const Scenario& sc, const Config& cfg,
                  const RunOptions& opts);

// Normalized random superposition, deterministic for a fixed seed.
Eigen::VectorXcd random_superposition(int dim, std::uint64_t seed);

}  // namespace relecho
