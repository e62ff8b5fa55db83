#pragma once

// Steady-state feasibility of a target follower density: mass thresholds
// for the leaders, synthesis of the leader reference density, and the
// local stability constants of the closed loop.

#include <cstdint>
#include <optional>

#include "densctl/grid.hpp"
#include "densctl/kernels.hpp"
#include "densctl/lemma_ode.hpp"
#include "densctl/targets.hpp"

namespace densctl {

struct FeasibilityOptions {
  /// Zero-set band |H| <= eps_H_rel * sup|H|.
  double eps_H_rel = 1e-8;
  /// Sign slack G <= eps_G_rel * sup|G| on the zero set.
  double eps_G_rel = 1e-8;
};

struct FeasibilityReport {
  double M_hat_1 = 0.0;
  double M_hat_2 = 0.0;
  bool zero_set_ok = true;
  GridFunction g1, g2, g_F, h_F, H, G;
  /// Follower-follower field of the normalized target.
  GridFunction v_ff_hat;
  double C = 0.0;
  double C_F = 0.0;
  double D = 0.0;
  double fl_ell = 0.0;

  /// M_hat_1 <= M_L <= M_hat_2, 0 < M_L < 1 and the zero-set condition.
  bool feasible_for(double M_L) const;
};

/// D grad(rho)/rho - f_FF * rho for the target profile (scaled by its mass).
/// Vector valued in 2D.
GridFunction steady_interaction_field(const TargetDensity& target, const GridFunction& ff_kernel, double D);

/// Thresholds for a 1D target. `ff_kernel` is the materialized
/// follower-follower kernel on the target's mesh.
FeasibilityReport theorem1_report(const TargetDensity& target, const GridFunction& ff_kernel, double fl_ell, double D,
                                  const FeasibilityOptions& opts = {});

enum class SynthesisMode { strict, fallback };

struct LeaderSynthesis {
  GridFunction rho_L;
  double B = 0.0;
  /// True when the shift-and-rescale fallback replaced the closed form.
  bool fallback_applied = false;
};

/// Closed-form leader reference. The target must carry mass M_F = 1 - M_L.
/// Strict mode throws InfeasibleError when M_L is outside the thresholds.
/// Fallback mode shifts an infeasible profile to min 0 and rescales it to M_L.
LeaderSynthesis synthesize_leader_density_1d(const FeasibilityReport& report, const TargetDensity& target, double M_L,
                                             SynthesisMode mode = SynthesisMode::strict);

struct Deconvolution2D {
  GridFunction rho_L;
  /// Zero-mean least-squares preimage.
  GridFunction R;
  bool feasible = false;
  double M_hat = 0.0;
};

/// Per-mode least-squares inversion of v = f * rho for a vector kernel.
/// The smallest nonnegative lift R - min R has mass M_hat. When M_hat <= M_L
/// the uniform remainder is added; otherwise R - min R is rescaled to M_L
/// and `feasible` is false.
Deconvolution2D deconvolve_2d(const GridFunction& vfl, const GridFunction& fl_kernel, double M_L);

struct StabilityReport {
  double g1_inf = 0.0;
  double F = 0.0;
  bool condition_holds = false;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  /// 0.5 * ||f_FF'||_2 as in the lemma mapping.
  double delta = 0.0;
  /// ||f_FF'||_2, the coefficient appearing in the final error bound.
  double delta_alt = 0.0;
  double k = 0.0;
  std::optional<double> basin_eta_star;
};

/// Stability constants. In 1D the kernel derivative is the analytic one away
/// from the origin; in 2D it is the central-difference divergence of the
/// materialized kernel.
StabilityReport stability_report(const TargetDensity& target, const KernelSpec& ff, const KernelSpec& fl, double D,
                                 const GridFunction& rho_L0, double K);

struct LeaderCountBounds {
  std::int64_t N_hat_1 = 0;
  /// Absent when the upper threshold is at or above one.
  std::optional<std::int64_t> N_hat_2;
};

/// ceil(M1 / (1 - M1) N_F) and floor(M2 / (1 - M2) N_F).
LeaderCountBounds leader_count_bounds(double M_hat_1, double M_hat_2, std::int64_t N_F);

}  // namespace densctl
