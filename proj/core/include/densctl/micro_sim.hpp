#pragma once

// Agent-based counterpart of the density model: leaders follow the
// collocated macroscopic control, followers interact pairwise and diffuse
// (Euler-Maruyama). Kernel density estimation closes the loop.

#include <cstdint>
#include <random>
#include <vector>

#include "densctl/grid.hpp"
#include "densctl/kernels.hpp"
#include "densctl/macro_sim.hpp"
#include "densctl/metrics.hpp"

namespace densctl {

/// Point evaluator for an interaction kernel. 1D kernels use their closed
/// form; 2D kernels are periodized once onto a table and interpolated
/// bilinearly.
class PointKernel {
 public:
  PointKernel() = default;
  explicit PointKernel(const KernelSpec& spec, int table_points = 256);
  /// Wraps a pre-tabulated 2D vector kernel.
  explicit PointKernel(const GridFunction& table);

  const KernelSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  bool zero() const { return zero_; }
  bool tabulated() const { return !table_.values().empty(); }

  /// Kernel at a displacement already wrapped into [-pi, pi)^d.
  Vec2 operator()(const Vec2& d) const;

 private:
  KernelSpec spec_;
  int dim_ = 1;
  bool zero_ = true;
  GridFunction table_;
  int n_ = 0;
  double inv_h_ = 0.0;
};

/// Per-agent Gaussian stream; independent of how many other agents exist.
struct AgentNoise {
  std::mt19937_64 engine;
  std::normal_distribution<double> normal{0.0, 1.0};
};

struct AgentState {
  int dim = 1;
  std::vector<Vec2> leaders;
  std::vector<Vec2> followers;
  double t = 0.0;
  long step_count = 0;
  std::uint64_t seed = 0;
  std::vector<AgentNoise> noise;
};

/// Seeds one stream per follower from (seed, species, id).
std::vector<AgentNoise> make_noise_streams(std::uint64_t seed, std::size_t followers);

/// Evenly spaced positions: 1D offsets (k + 1/2) 2pi/N; 2D a per-species
/// lattice of ceil(sqrt(N)) columns filled row by row.
std::vector<Vec2> equally_spaced(std::size_t count, int dim);

/// (1/(N_L+N_F)) (sum_j f_FL(x_k - y_j) + sum_m f_FF(x_k - x_m)) with wrapped
/// displacements, by direct double loop.
std::vector<Vec2> follower_drift(const AgentState& state, const PointKernel& fl, const PointKernel& ff);

/// Sum over sources of the 1D repulsive profile with length ell at each
/// query, O((S + Q) log(S + Q)). Coincident points contribute 0.
std::vector<double> repulsive_sum_1d(double ell, const std::vector<double>& sources,
                                     const std::vector<double>& queries);

/// Same result as follower_drift for 1D closed-form kernels, using
/// repulsive_sum_1d.
std::vector<Vec2> follower_drift_fast_1d(const AgentState& state, const KernelSpec& fl, const KernelSpec& ff);

/// Uses pair antisymmetry for the follower-follower sum (2D tables).
std::vector<Vec2> follower_drift_pairwise(const AgentState& state, const PointKernel& fl, const PointKernel& ff);

/// Interpolated control velocities at the leader positions.
std::vector<Vec2> collocate(const GridFunction& u_field, const std::vector<Vec2>& leaders);

struct BridgeConfig {
  double kde_concentration = 50.0;
  PeriodicMesh mesh;
};

/// mass/N * sum of unit-mass von Mises kernels (product kernel in 2D),
/// rescaled to integrate to `mass` on the mesh.
GridFunction kde(const std::vector<Vec2>& positions, double mass, const BridgeConfig& bridge);

/// Unrescaled direct evaluation of the same sum (reference implementation).
GridFunction kde_direct(const std::vector<Vec2>& positions, double mass, const BridgeConfig& bridge);

struct MicroStepInput {
  double dt = 0.01;
  double D = 0.0;
};

/// One Euler-Maruyama step. `drift` holds one vector per follower and
/// `leader_velocity` one per leader.
void step_euler_maruyama(AgentState& state, const std::vector<Vec2>& drift,
                         const std::vector<Vec2>& leader_velocity, const MicroStepInput& in);

struct MicroRunConfig {
  int dim = 1;
  KernelSpec fl;
  KernelSpec ff;
  double D = 0.02;
  double K = 1.0;
  double dt = 0.01;
  double T = 1.0;
  int output_stride = 100;
  std::uint64_t seed = 0;
  std::vector<Vec2> leaders0;
  std::vector<Vec2> followers0;
  /// Target follower density on the estimation mesh, mass N_F / N.
  GridFunction rho_F_ref;
  /// Leader reference density on the estimation mesh, mass N_L / N.
  GridFunction rho_L_ref;
  BridgeConfig bridge;
  ControlLaw law = ControlLaw::antiderivative;
  /// Densities below this are clamped when dividing the control flux.
  double density_floor = 1e-12;
  int kernel_table_points = 256;
  std::vector<double> snapshot_times;
};

struct MicroRunResult {
  std::vector<DiagnosticSample> series;
  AgentState final_state;
  std::vector<AgentState> snapshots;
};

/// Leader velocity field from the leaders' KDE: control flux divided by the
/// clamped estimate.
GridFunction micro_control_field(const GridFunction& rho_L_est, const MicroRunConfig& cfg);

MicroRunResult run_micro(const MicroRunConfig& cfg);

}  // namespace densctl
