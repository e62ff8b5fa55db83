#pragma once

#include "densctl/grid.hpp"

namespace densctl {

enum class KernelKind { none, repulsive, morse };

/// Parametric interaction kernel. `repulsive` uses only `ell`; `morse`
/// uses (ell_r, ell_a, zeta). `none` is the zero kernel.
struct KernelSpec {
  KernelKind kind = KernelKind::none;
  int dim = 1;
  double ell = kPi;
  double ell_r = kPi / 2;
  double ell_a = kPi;
  double zeta = 1.0;
  /// Periodization radius in 2D. 0 picks the smallest radius whose analytic
  /// tail bound is below 1e-10.
  int images = 0;

  static KernelSpec none(int dim = 1);
  static KernelSpec repulsive(double ell, int dim = 1);
  static KernelSpec morse(double ell_r, double ell_a, double zeta, int dim = 1);

  /// Throws InvalidArgument on nonpositive lengths or negative zeta.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

/// sgn(x) / (e^{2pi/l} - 1) * (e^{(2pi-|x|)/l} - e^{|x|/l}), evaluated in an
/// overflow-free form.
double eval_repulsive_1d(double ell, double x);
double eval_repulsive_1d(const KernelSpec& spec, double x);
double eval_morse_1d(const KernelSpec& spec, double x);

/// Dispatches on spec.kind (1D closed forms).
double eval_1d(const KernelSpec& spec, double x);

/// Derivative of the 1D kernel away from the jump at x = 0. The value
/// returned at 0 is the (even) one-sided limit.
double eval_derivative_1d(const KernelSpec& spec, double x);

/// Single-term 2D profile (x/|x|) exp(-|x|/ell), zero at the origin.
Vec2 eval_nonperiodic_2d(double ell, const Vec2& x);
/// Full 2D non-periodic kernel: repulsive or (1/l_r) f_r - (zeta/l_a) f_a.
Vec2 eval_nonperiodic_2d(const KernelSpec& spec, const Vec2& x);

/// Upper bound on the sup-norm contribution of all image shells beyond
/// `images`: sum_{r > images} 8 r w e^{-2pi (r-1)/l} over each kernel term.
double periodization_tail_bound(const KernelSpec& spec, int images);

/// Radius used when spec.images == 0.
int default_images(const KernelSpec& spec, double tol = 1e-10);

/// Sums eval_nonperiodic_2d over the (2 images + 1)^2 periodic shifts.
GridFunction periodize_2d(const KernelSpec& spec, const PeriodicMesh& mesh, int images);

/// Kernel sampled at every mesh node. 1D: closed form, scalar. 2D:
/// periodized, two components.
GridFunction materialize(const KernelSpec& spec, const PeriodicMesh& mesh);

/// eval_derivative_1d sampled on a 1D mesh.
GridFunction materialize_derivative_1d(const KernelSpec& spec, const PeriodicMesh& mesh);

}  // namespace densctl
