#pragma once

// Turns a ScenarioConfig into the run configurations of the core library.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "densctl/config.hpp"
#include "densctl/feasibility.hpp"
#include "densctl/macro_sim.hpp"
#include "densctl/micro_sim.hpp"

namespace densctl::app {

struct Scenario {
  PeriodicMesh mesh;
  /// Unit-mass target.
  TargetDensity target;
  KernelSpec fl;
  KernelSpec ff;
  GridFunction fl_kernel;
  GridFunction ff_kernel;
};

Scenario build_scenario(const ScenarioConfig& cfg);

/// Leader reference for leader mass M_L, with whatever threshold
/// information the dimension allows.
struct LeaderReference {
  GridFunction rho_L;
  GridFunction rho_F;
  /// 1D: closed-form thresholds. 2D: M_hat_1 is the deconvolution mass and
  /// M_hat_2 is +inf.
  double M_hat_1 = 0.0;
  double M_hat_2 = 0.0;
  bool feasible = false;
  bool fallback_applied = false;
  std::optional<FeasibilityReport> report;
};

/// Throws InfeasibleError when M_L is infeasible and the config does not
/// allow the fallback synthesis.
LeaderReference leader_reference(const ScenarioConfig& cfg, const Scenario& sc, double M_L);

/// reference | uniform | file, rescaled to `mass`.
GridFunction initial_density(const std::string& spec, const GridFunction& reference, double mass);

MacroRunConfig macro_config(const ScenarioConfig& cfg, const Scenario& sc, const LeaderReference& ref, double M_L);

MicroRunConfig micro_config(const ScenarioConfig& cfg, const Scenario& sc, const LeaderReference& ref,
                            std::int64_t N_L, std::int64_t N_F, std::uint64_t seed);

/// splitmix64 of (master, index): per-point seeds independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace densctl::app
