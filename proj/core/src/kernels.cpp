#include "densctl/kernels.hpp"

#include <cmath>

#include "densctl/error.hpp"

namespace densctl {
namespace {

double sgn(double x) { return (x > 0) - (x < 0); }

// sinh(a) / sinh(b) for 0 <= a <= b, b > 0, without overflow.
double sinh_ratio(double a, double b) {
  return std::exp(a - b) * -std::expm1(-2.0 * a) / -std::expm1(-2.0 * b);
}

// cosh(a) / sinh(b) for 0 <= a <= b, b > 0.
double cosh_sinh_ratio(double a, double b) {
  return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / -std::expm1(-2.0 * b);
}

double repulsive_derivative(double ell, double x) {
  const double ax = std::min(std::abs(x), kPi);
  return -cosh_sinh_ratio((kPi - ax) / ell, kPi / ell) / ell;
}

double shell_bound(double ell, double weight, int images) {
  double sum = 0.0;
  for (int r = images + 1;; ++r) {
    double term = 8.0 * r * weight * std::exp(-kTwoPi * (r - 1) / ell);
    sum += term;
    if (term < 1e-18 * sum || r > images + 10000) break;
  }
  return sum;
}

}  // namespace

KernelSpec KernelSpec::none(int dim) {
  KernelSpec s;
  s.dim = dim;
  return s;
}

KernelSpec KernelSpec::repulsive(double ell, int dim) {
  KernelSpec s;
  s.kind = KernelKind::repulsive;
  s.ell = ell;
  s.dim = dim;
  s.validate();
  return s;
}

KernelSpec KernelSpec::morse(double ell_r, double ell_a, double zeta, int dim) {
  KernelSpec s;
  s.kind = KernelKind::morse;
  s.ell_r = ell_r;
  s.ell_a = ell_a;
  s.zeta = zeta;
  s.dim = dim;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (dim != 1 && dim != 2) throw InvalidArgument("kernel dimension must be 1 or 2");
  if (images < 0) throw InvalidArgument("kernel images must be >= 0");
  if (kind == KernelKind::repulsive && !(ell > 0)) throw InvalidArgument("repulsive kernel needs ell > 0");
  if (kind == KernelKind::morse) {
    if (!(ell_r > 0) || !(ell_a > 0)) throw InvalidArgument("Morse kernel needs ell_r, ell_a > 0");
    if (!(zeta >= 0)) throw InvalidArgument("Morse kernel needs zeta >= 0");
  }
}

double eval_repulsive_1d(double ell, double x) {
  if (x == 0.0) return 0.0;
  const double ax = std::min(std::abs(x), kPi);
  return sgn(x) * sinh_ratio((kPi - ax) / ell, kPi / ell);
}

double eval_repulsive_1d(const KernelSpec& spec, double x) { return eval_repulsive_1d(spec.ell, x); }

double eval_morse_1d(const KernelSpec& spec, double x) {
  return eval_repulsive_1d(spec.ell_r, x) / spec.ell_r - spec.zeta / spec.ell_a * eval_repulsive_1d(spec.ell_a, x);
}

double eval_1d(const KernelSpec& spec, double x) {
  switch (spec.kind) {
    case KernelKind::none: return 0.0;
    case KernelKind::repulsive: return eval_repulsive_1d(spec.ell, x);
    case KernelKind::morse: return eval_morse_1d(spec, x);
  }
  return 0.0;
}

double eval_derivative_1d(const KernelSpec& spec, double x) {
  switch (spec.kind) {
    case KernelKind::none: return 0.0;
    case KernelKind::repulsive: return repulsive_derivative(spec.ell, x);
    case KernelKind::morse:
      return repulsive_derivative(spec.ell_r, x) / spec.ell_r -
             spec.zeta / spec.ell_a * repulsive_derivative(spec.ell_a, x);
  }
  return 0.0;
}

Vec2 eval_nonperiodic_2d(double ell, const Vec2& x) {
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) return {0.0, 0.0};
  const double s = std::exp(-r / ell) / r;
  return {x[0] * s, x[1] * s};
}

Vec2 eval_nonperiodic_2d(const KernelSpec& spec, const Vec2& x) {
  switch (spec.kind) {
    case KernelKind::none: return {0.0, 0.0};
    case KernelKind::repulsive: return eval_nonperiodic_2d(spec.ell, x);
    case KernelKind::morse: {
      Vec2 r = eval_nonperiodic_2d(spec.ell_r, x);
      Vec2 a = eval_nonperiodic_2d(spec.ell_a, x);
      const double wr = 1.0 / spec.ell_r;
      const double wa = spec.zeta / spec.ell_a;
      return {wr * r[0] - wa * a[0], wr * r[1] - wa * a[1]};
    }
  }
  return {0.0, 0.0};
}

double periodization_tail_bound(const KernelSpec& spec, int images) {
  switch (spec.kind) {
    case KernelKind::none: return 0.0;
    case KernelKind::repulsive: return shell_bound(spec.ell, 1.0, images);
    case KernelKind::morse:
      return shell_bound(spec.ell_r, 1.0 / spec.ell_r, images) +
             (spec.zeta > 0 ? shell_bound(spec.ell_a, spec.zeta / spec.ell_a, images) : 0.0);
  }
  return 0.0;
}

int default_images(const KernelSpec& spec, double tol) {
  int m = 1;
  while (periodization_tail_bound(spec, m) > tol && m < 1000) ++m;
  return m;
}

GridFunction periodize_2d(const KernelSpec& spec, const PeriodicMesh& mesh, int images) {
  if (mesh.dim() != 2) throw InvalidArgument("periodize_2d: 2D mesh required");
  if (images < 1) throw InvalidArgument("periodize_2d: images must be >= 1");
  GridFunction out(mesh, 2);
  for (std::size_t node = 0; node < mesh.num_nodes(); ++node) {
    const Vec2 p = mesh.node_point(node);
    double s0 = 0.0, s1 = 0.0;
    for (int a = -images; a <= images; ++a)
      for (int b = -images; b <= images; ++b) {
        Vec2 v = eval_nonperiodic_2d(spec, {p[0] + kTwoPi * a, p[1] + kTwoPi * b});
        s0 += v[0];
        s1 += v[1];
      }
    out.at(0, node) = s0;
    out.at(1, node) = s1;
  }
  // Nodes on the x = -pi edges are their own mirror images and the truncated
  // square of shifts is not symmetric about them; averaging with the mirrored
  // value restores exact oddness and moves values by at most the tail.
  const int n = mesh.points_per_axis();
  GridFunction odd(mesh, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t a = static_cast<std::size_t>(i) * n + j;
      const std::size_t b = static_cast<std::size_t>((n - i) % n) * n + (n - j) % n;
      for (int c = 0; c < 2; ++c) odd.at(c, a) = 0.5 * (out.at(c, a) - out.at(c, b));
    }
  return odd;
}

GridFunction materialize(const KernelSpec& spec, const PeriodicMesh& mesh) {
  spec.validate();
  if (spec.dim != mesh.dim()) throw InvalidArgument("materialize: kernel and mesh dimensions differ");
  if (mesh.dim() == 1) return GridFunction::sample(mesh, [&](const Vec2& p) { return eval_1d(spec, p[0]); });
  if (spec.kind == KernelKind::none) return GridFunction(mesh, 2);
  return periodize_2d(spec, mesh, spec.images > 0 ? spec.images : default_images(spec));
}

GridFunction materialize_derivative_1d(const KernelSpec& spec, const PeriodicMesh& mesh) {
  if (mesh.dim() != 1) throw InvalidArgument("materialize_derivative_1d: 1D mesh required");
  return GridFunction::sample(mesh, [&](const Vec2& p) { return eval_derivative_1d(spec, p[0]); });
}

}  // namespace densctl
