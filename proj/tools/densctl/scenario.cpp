#include "scenario.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "densctl/error.hpp"

namespace densctl::app {

Scenario build_scenario(const ScenarioConfig& cfg) {
  Scenario sc;
  sc.mesh = PeriodicMesh(cfg.dim, cfg.n);
  switch (cfg.family) {
    case TargetFamily::von_mises:
      sc.target = von_mises_1d(cfg.kappa, cfg.mu, sc.mesh);
      break;
    case TargetFamily::bimodal_von_mises:
      sc.target = bimodal_von_mises_2d(cfg.kappa1, cfg.kappa2, cfg.mu, cfg.nu, sc.mesh);
      break;
    case TargetFamily::tabulated: {
      GridFunction table = read_csv(cfg.target_file);
      if (!(table.mesh() == sc.mesh)) throw ConfigError("target.file mesh does not match domain.dim/domain.n");
      sc.target = scale_to_mass(tabulated_target(table), 1.0);
      break;
    }
  }
  sc.fl = KernelSpec::repulsive(cfg.fl_ell, cfg.dim);
  sc.fl.images = cfg.images;
  sc.ff = cfg.ff;
  sc.ff.dim = cfg.dim;
  sc.ff.images = cfg.images;
  sc.fl_kernel = materialize(sc.fl, sc.mesh);
  sc.ff_kernel = materialize(sc.ff, sc.mesh);
  return sc;
}

LeaderReference leader_reference(const ScenarioConfig& cfg, const Scenario& sc, double M_L) {
  LeaderReference ref;
  const TargetDensity scaled = scale_to_mass(sc.target, 1.0 - M_L);
  ref.rho_F = scaled.profile;
  if (cfg.dim == 1) {
    FeasibilityOptions opts{cfg.eps_H_rel, cfg.eps_G_rel};
    FeasibilityReport report = theorem1_report(sc.target, sc.ff_kernel, cfg.fl_ell, cfg.D, opts);
    ref.M_hat_1 = report.M_hat_1;
    ref.M_hat_2 = report.M_hat_2;
    ref.feasible = report.feasible_for(M_L);
    if (!ref.feasible && !cfg.fallback_synthesis)
      throw InfeasibleError("leader mass " + std::to_string(M_L) + " is outside the feasible interval [" +
                            std::to_string(report.M_hat_1) + ", " + std::to_string(report.M_hat_2) +
                            "]; set feasibility.fallback = true to run anyway");
    auto syn = synthesize_leader_density_1d(report, scaled, M_L,
                                            ref.feasible ? SynthesisMode::strict : SynthesisMode::fallback);
    ref.rho_L = syn.rho_L;
    ref.fallback_applied = syn.fallback_applied;
    ref.report = std::move(report);
  } else {
    GridFunction vfl = steady_interaction_field(scaled, sc.ff_kernel, cfg.D);
    Deconvolution2D dec = deconvolve_2d(vfl, sc.fl_kernel, M_L);
    ref.M_hat_1 = dec.M_hat;
    ref.M_hat_2 = std::numeric_limits<double>::infinity();
    ref.feasible = dec.feasible;
    if (!ref.feasible && !cfg.fallback_synthesis)
      throw InfeasibleError("leader mass " + std::to_string(M_L) + " is below the deconvolution mass " +
                            std::to_string(dec.M_hat) + "; set feasibility.fallback = true to run anyway");
    ref.rho_L = dec.rho_L;
    ref.fallback_applied = !dec.feasible;
  }
  return ref;
}

GridFunction initial_density(const std::string& spec, const GridFunction& reference, double mass) {
  const PeriodicMesh& mesh = reference.mesh();
  if (spec == "reference" || spec == "target") return reference * (mass / integral(reference));
  if (spec == "uniform") return GridFunction(mesh, 1, mass / std::pow(kTwoPi, mesh.dim()));
  GridFunction f = read_csv(spec);
  if (!(f.mesh() == mesh) || !f.is_scalar()) throw ConfigError("initial density file " + spec + " does not match the mesh");
  if (f.min() < 0) throw ConfigError("initial density file " + spec + " has negative samples");
  const double m = integral(f);
  if (!(m > 0)) throw ConfigError("initial density file " + spec + " has zero mass");
  return f * (mass / m);
}

MacroRunConfig macro_config(const ScenarioConfig& cfg, const Scenario& sc, const LeaderReference& ref, double M_L) {
  MacroRunConfig mc;
  mc.fl_kernel = sc.fl_kernel;
  mc.ff_kernel = sc.ff_kernel;
  mc.rho_F_ref = ref.rho_F;
  mc.rho_L_ref = ref.rho_L;
  mc.rho_L0 = initial_density(cfg.initial_leaders, ref.rho_L, M_L);
  mc.rho_F0 = initial_density(cfg.initial_followers, ref.rho_F, 1.0 - M_L);
  mc.D = cfg.D;
  mc.K = cfg.K;
  mc.dt = cfg.dt;
  mc.T = cfg.T;
  mc.output_stride = cfg.output_stride;
  mc.law = cfg.law;
  mc.substeps = cfg.substeps;
  mc.density_floor = cfg.density_floor;
  mc.snapshot_times = cfg.snapshot_times;
  return mc;
}

MicroRunConfig micro_config(const ScenarioConfig& cfg, const Scenario& sc, const LeaderReference& ref,
                            std::int64_t N_L, std::int64_t N_F, std::uint64_t seed) {
  MicroRunConfig mc;
  mc.dim = cfg.dim;
  mc.fl = sc.fl;
  mc.ff = sc.ff;
  mc.D = cfg.D;
  mc.K = cfg.K;
  mc.dt = cfg.dt;
  mc.T = cfg.T;
  mc.output_stride = cfg.output_stride;
  mc.seed = seed;
  mc.leaders0 = equally_spaced(static_cast<std::size_t>(N_L), cfg.dim);
  mc.followers0 = equally_spaced(static_cast<std::size_t>(N_F), cfg.dim);
  mc.rho_F_ref = ref.rho_F;
  mc.rho_L_ref = ref.rho_L;
  mc.bridge.kde_concentration = cfg.kde_concentration;
  mc.bridge.mesh = sc.mesh;
  mc.law = cfg.law;
  mc.density_floor = cfg.density_floor;
  mc.kernel_table_points = cfg.table_points;
  mc.snapshot_times = cfg.snapshot_times;
  return mc;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace densctl::app
