#pragma once

// Forward-Euler integration of the leader/follower continuity equations
// with the leaders driven by a mass-error feedback law.

#include <complex>
#include <string>
#include <vector>

#include "densctl/grid.hpp"
#include "densctl/metrics.hpp"
#include "densctl/targets.hpp"

namespace densctl {

enum class ControlLaw {
  /// Leader flux -K * cumulative integral of the mass error from -pi (1D only).
  antiderivative,
  /// Leader flux -grad(phi) with lap(phi) = K e_L solved spectrally.
  poisson,
};

struct SimState {
  double t = 0.0;
  GridFunction rho_L;
  GridFunction rho_F;
  /// Leader velocity. Zero wherever rho_L is below the density floor.
  GridFunction u;
  long step_count = 0;
};

struct MacroRunConfig {
  GridFunction fl_kernel;
  GridFunction ff_kernel;
  /// Target follower density with the follower mass.
  GridFunction rho_F_ref;
  GridFunction rho_L_ref;
  GridFunction rho_L0;
  GridFunction rho_F0;
  double D = 0.02;
  double K = 1.0;
  double dt = 0.01;
  double T = 1.0;
  /// Record diagnostics every this many steps (the initial state is always recorded).
  int output_stride = 10;
  ControlLaw law = ControlLaw::antiderivative;
  /// Diffusion sub-steps per dt. 0 picks the smallest count keeping
  /// dim * D * dt_sub / h^2 <= 0.45.
  int substeps = 0;
  double density_floor = 1e-12;
  double negativity_tolerance = 1e-8;
  /// Times at which to keep a copy of the state.
  std::vector<double> snapshot_times;

  /// Throws InvalidArgument on inconsistent meshes or parameters.
  void validate() const;
};

struct MacroRunResult {
  std::vector<DiagnosticSample> series;
  SimState final_state;
  std::vector<SimState> snapshots;
  int substeps = 1;
  /// Advisory messages (stability guards, sub-stepping).
  std::vector<std::string> notes;
};

/// Leader flux rho_L u for the 1D law: -K * antiderivative(rho_L_ref - rho_L).
GridFunction control_flux_1d(const GridFunction& rho_L, const GridFunction& rho_L_ref, double K);

/// Leader flux -grad(phi) with lap(phi) = K (rho_L_ref - rho_L), spectral,
/// any dimension. The mean of the error is projected out.
GridFunction control_flux_poisson(const GridFunction& rho_L, const GridFunction& rho_L_ref, double K);

/// u = flux / rho_L. Throws NumericalAbort if rho_L < floor where the flux
/// exceeds the floor.
GridFunction velocity_from_flux(const GridFunction& flux, const GridFunction& rho_L, double floor);

GridFunction control_field_1d(const SimState& state, const GridFunction& rho_L_ref, double K, double floor = 1e-12);
GridFunction control_field_2d(const SimState& state, const GridFunction& rho_L_ref, double K, double floor = 1e-12);

class MacroSimulator {
 public:
  explicit MacroSimulator(MacroRunConfig config);

  const MacroRunConfig& config() const { return config_; }
  int substeps() const { return substeps_; }
  const std::vector<std::string>& notes() const { return notes_; }

  SimState initial_state() const;
  /// Advances by one dt. Throws NumericalAbort on NaN/Inf, negative
  /// follower density or a near-vacuum leader density under nonzero flux.
  void step(SimState& state) const;
  DiagnosticSample diagnostics(const SimState& state) const;

 private:
  void substep(SimState& state, double ds) const;
  GridFunction leader_flux(const GridFunction& rho_L) const;

  MacroRunConfig config_;
  int substeps_ = 1;
  std::vector<std::string> notes_;
  std::vector<std::vector<std::complex<double>>> fl_hat_;
  std::vector<std::vector<std::complex<double>>> ff_hat_;
};

/// Integrates to T, sampling diagnostics every output_stride steps. pct_*
/// are relative to the errors at t = 0.
MacroRunResult run(const MacroRunConfig& config);

}  // namespace densctl
