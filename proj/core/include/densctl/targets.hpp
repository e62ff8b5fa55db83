#pragma once

#include "densctl/grid.hpp"

namespace densctl {

/// Target follower density. `profile` integrates to `mass`, `normalized`
/// to one.
struct TargetDensity {
  GridFunction profile;
  double mass = 1.0;
  GridFunction normalized;
};

/// Modified Bessel function I0 by its power series (kappa <= 20) or the
/// standard library beyond that range.
double bessel_i0(double kappa);

/// e^{kappa cos(x - mu)} / (2 pi I0(kappa)) on a 1D mesh, unit mass.
TargetDensity von_mises_1d(double kappa, double mu, const PeriodicMesh& mesh);

/// Z exp(k1 cos(x1-mu) + k2 cos(x2-nu) + cos^2(x1-mu) + sin^2(x2-nu)) on a 2D
/// mesh, Z fixed numerically so the mesh integral is one.
TargetDensity bimodal_von_mises_2d(double kappa1, double kappa2, double mu, double nu, const PeriodicMesh& mesh);

/// Wraps a strictly positive sampled profile; mass is its integral.
TargetDensity tabulated_target(const GridFunction& profile);

/// profile = M * normalized. Accepts 0 < M <= 1.
TargetDensity scale_to_mass(const TargetDensity& t, double mass);

}  // namespace densctl
