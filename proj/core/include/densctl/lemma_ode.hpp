#pragma once

// Auxiliary planar system bounding the follower error functional:
//   eta' = (-alpha + beta xi) eta + (gamma xi + delta eta) sqrt(eta)
//   xi'  = -k xi

#include <array>
#include <optional>
#include <vector>

namespace densctl {

struct LemmaParams {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 1.0;
  double k = 1.0;
};

enum class EquilibriumType { stable_node, saddle, unstable_node };

struct Equilibrium {
  double eta = 0.0;
  double xi = 0.0;
  std::array<double, 2> eigenvalues{};
  EquilibriumType type = EquilibriumType::stable_node;
};

/// The origin and, when delta > 0, the saddle at (alpha^2/delta^2, 0).
std::vector<Equilibrium> equilibria(const LemmaParams& p);

/// Intersections of the eta-nullcline with xi = 1. Absent when the
/// discriminant is negative or the larger root is not positive.
struct BasinEstimate {
  std::optional<double> eta_1;
  std::optional<double> eta_2;
  std::optional<double> basin_bound;
};

BasinEstimate basin_estimate(const LemmaParams& p);

/// Right-hand side (eta', xi'); eta is clamped at zero before the sqrt.
std::array<double, 2> lemma_rhs(const LemmaParams& p, double eta, double xi);

enum class Fate { converges, diverges, undetermined };

struct LemmaOptions {
  double dt = 1e-3;
  /// Horizon; 0 means 200 / k.
  double horizon = 0.0;
  double blowup = 1e12;
  /// Once xi drops below this, the fate is read off the autonomous system.
  double xi_cutoff = 1e-12;
  /// Keep every n-th sample in the returned trajectory (0 keeps none).
  int record_every = 0;
};

struct LemmaTrajectory {
  std::vector<double> t;
  std::vector<double> eta;
  std::vector<double> xi;
  Fate fate = Fate::undetermined;
  double final_t = 0.0;
  double final_eta = 0.0;
  double final_xi = 1.0;
};

/// RK4 integration from (eta0, 1). Stops at blow-up, at the xi cutoff, or
/// at the horizon.
LemmaTrajectory integrate(const LemmaParams& p, double eta0, const LemmaOptions& opts = {});

/// Fixed-horizon integration without early stopping, recording every step.
LemmaTrajectory integrate_fixed(const LemmaParams& p, double eta0, double T, double dt);

}  // namespace densctl
