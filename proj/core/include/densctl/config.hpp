#pragma once

// Scenario configuration: a line-oriented `key = value` format with dotted
// section prefixes. Numeric values accept arithmetic with `pi`, e.g.
// `kernels.ff.ell_r = pi/15`. Lists are comma separated, ranges `lo:hi:count`.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "densctl/kernels.hpp"
#include "densctl/macro_sim.hpp"

namespace densctl {

enum class Mode { feasibility_map, macro, micro, basin, sweep_ml };
enum class TargetFamily { von_mises, bimodal_von_mises, tabulated };
enum class SweepModel { macro, micro };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
  /// count points from lo to hi inclusive (a single point is lo).
  std::vector<double> points() const;
  bool operator==(const Range&) const = default;
};

struct ScenarioConfig {
  Mode mode = Mode::macro;

  int dim = 1;
  int n = 500;

  TargetFamily family = TargetFamily::von_mises;
  double kappa = 1.0;
  double mu = 0.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double nu = 0.0;
  std::string target_file;

  double fl_ell = kPi;
  KernelSpec ff;
  int images = 0;
  int table_points = 256;

  double D = 0.02;
  double K = 1.0;
  ControlLaw law = ControlLaw::antiderivative;
  double density_floor = 1e-12;

  std::optional<double> M_F;
  std::optional<double> M_L;
  std::optional<std::int64_t> N_F;
  std::optional<std::int64_t> N_L;

  double dt = 0.01;
  double T = 100.0;
  int output_stride = 100;
  int substeps = 0;
  std::vector<double> snapshot_times;

  std::vector<std::uint64_t> seeds{0};
  double kde_concentration = 50.0;

  Range kappa_range{0.1, 3.0, 30};
  Range D_range{0.01, 0.2, 20};
  Range ML_range{0.1, 0.9, 17};
  int refine_points = 4;
  SweepModel sweep_model = SweepModel::macro;
  std::int64_t total_agents = 500;

  /// reference | uniform | path to a grid CSV
  std::string initial_leaders = "uniform";
  /// target | uniform | path to a grid CSV
  std::string initial_followers = "uniform";

  double eps_H_rel = 1e-8;
  double eps_G_rel = 1e-8;
  bool fallback_synthesis = false;

  std::optional<double> basin_alpha, basin_beta, basin_gamma, basin_delta, basin_k;
  int basin_samples = 0;
  double basin_lo = 0.1;
  double basin_hi = 5.0;
  std::vector<double> basin_eta_fractions{0.5, 0.99, 1.01, 2.0};
  double lemma_dt = 1e-3;
  double lemma_blowup = 1e12;

  std::string output_dir = "runs";
  /// initial | reference
  std::string percent_normalizer = "initial";

  bool operator==(const ScenarioConfig&) const = default;

  /// Follower and leader masses resolved from masses.* or counts.*.
  double follower_mass() const;
  double leader_mass() const;
};

/// Parses and validates. `base_dir` resolves relative file paths. Throws
/// ConfigError listing unknown keys, missing keys or violated constraints.
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = "");

/// Reads a file and parses it relative to its directory.
ScenarioConfig load_config(const std::string& path);

/// Every key with its resolved value, one per line, reparseable.
std::string serialize(const ScenarioConfig& cfg);

/// Evaluates numeric expressions with + - * / ^, parentheses and `pi`.
double evaluate_expression(const std::string& text);

}  // namespace densctl
