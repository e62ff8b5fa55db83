#include "densctl/targets.hpp"

#include <cmath>

#include "densctl/error.hpp"

namespace densctl {

double bessel_i0(double kappa) {
  const double ak = std::abs(kappa);
  if (ak > 20.0) return std::cyl_bessel_i(0.0, ak);
  // sum_k ((x/2)^{2k}) / (k!)^2
  const double q = 0.25 * ak * ak;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

TargetDensity von_mises_1d(double kappa, double mu, const PeriodicMesh& mesh) {
  if (!(kappa > 0)) throw InvalidArgument("von Mises concentration must be positive");
  if (mesh.dim() != 1) throw InvalidArgument("von_mises_1d: 1D mesh required");
  const double norm = 1.0 / (kTwoPi * bessel_i0(kappa));
  auto profile = GridFunction::sample(mesh, [&](const Vec2& p) { return norm * std::exp(kappa * std::cos(p[0] - mu)); });
  return {profile, 1.0, profile};
}

TargetDensity bimodal_von_mises_2d(double kappa1, double kappa2, double mu, double nu, const PeriodicMesh& mesh) {
  if (!(kappa1 > 0) || !(kappa2 > 0)) throw InvalidArgument("von Mises concentrations must be positive");
  if (mesh.dim() != 2) throw InvalidArgument("bimodal_von_mises_2d: 2D mesh required");
  auto profile = GridFunction::sample(mesh, [&](const Vec2& p) {
    const double c1 = std::cos(p[0] - mu);
    const double s2 = std::sin(p[1] - nu);
    return std::exp(kappa1 * c1 + kappa2 * std::cos(p[1] - nu) + c1 * c1 + s2 * s2);
  });
  profile *= 1.0 / integral(profile);
  return {profile, 1.0, profile};
}

TargetDensity tabulated_target(const GridFunction& profile) {
  if (!profile.is_scalar()) throw InvalidArgument("tabulated target must be scalar");
  if (!(profile.min() > 0)) throw InvalidArgument("tabulated target must be strictly positive");
  const double mass = integral(profile);
  GridFunction normalized = profile * (1.0 / mass);
  return {profile, mass, normalized};
}

TargetDensity scale_to_mass(const TargetDensity& t, double mass) {
  if (!(mass > 0) || mass > 1.0) throw InvalidArgument("follower mass must lie in (0, 1]");
  return {t.normalized * mass, mass, t.normalized};
}

}  // namespace densctl
