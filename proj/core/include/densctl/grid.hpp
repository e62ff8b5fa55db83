#pragma once

// Uniform periodic meshes over [-pi, pi]^d (d = 1, 2) and the discrete
// calculus used by every other module.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace densctl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// A point (or small vector) in [-pi, pi]^d. Only the first `dim` entries are used.
using Vec2 = std::array<double, 2>;

/// Uniform mesh with nodes x_j = -pi + j * 2pi/n per axis. The +pi node is
/// identified with -pi and is not stored.
class PeriodicMesh {
 public:
  PeriodicMesh() = default;
  PeriodicMesh(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return spacing_; }
  /// spacing^dim, the quadrature weight of a node.
  double cell_volume() const;
  std::size_t num_nodes() const;
  /// -pi + j h, computed as (j - n/2) h so that x = 0 is exact and nodes
  /// mirror exactly about it.
  double coord(int j) const { return (j - 0.5 * n_) * spacing_; }
  /// Coordinates of a flat node index (row-major, last axis fastest).
  Vec2 node_point(std::size_t node) const;

  bool operator==(const PeriodicMesh&) const = default;

 private:
  int dim_ = 1;
  int n_ = 1;
  double spacing_ = kTwoPi;
};

/// A field sampled on a PeriodicMesh. `components` is 1 for scalars and
/// `dim` for vector fields. Values are stored component-major:
/// values[c * num_nodes + node].
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(const PeriodicMesh& mesh, int components = 1, double fill = 0.0);
  GridFunction(const PeriodicMesh& mesh, int components, std::vector<double> values);

  /// Samples `fn(point)` at every node (scalar fields).
  template <typename Fn>
  static GridFunction sample(const PeriodicMesh& mesh, Fn&& fn) {
    GridFunction out(mesh, 1);
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) out.values_[i] = fn(mesh.node_point(i));
    return out;
  }

  const PeriodicMesh& mesh() const { return mesh_; }
  int components() const { return components_; }
  bool is_scalar() const { return components_ == 1; }
  std::size_t num_nodes() const { return mesh_.num_nodes(); }

  std::span<const double> component(int c) const;
  std::span<double> component(int c);
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::size_t node) const { return values_[node]; }
  double& operator[](std::size_t node) { return values_[node]; }
  double at(int c, std::size_t node) const { return values_[c * num_nodes() + node]; }
  double& at(int c, std::size_t node) { return values_[c * num_nodes() + node]; }

  double min() const;
  double max() const;
  double max_abs() const;

  GridFunction& operator+=(const GridFunction& rhs);
  GridFunction& operator-=(const GridFunction& rhs);
  GridFunction& operator*=(double s);

 private:
  PeriodicMesh mesh_;
  int components_ = 1;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction lhs, const GridFunction& rhs);
GridFunction operator-(GridFunction lhs, const GridFunction& rhs);
GridFunction operator*(GridFunction lhs, double s);
GridFunction operator*(double s, GridFunction rhs);

/// Throws InvalidArgument unless both functions live on the same mesh.
void require_same_mesh(const GridFunction& a, const GridFunction& b, const char* what);

/// (x - y + pi) mod 2pi - pi, the displacement of x relative to y wrapped
/// into [-pi, pi).
double wrap_displacement(double x, double y);
Vec2 wrap_displacement(const Vec2& x, const Vec2& y, int dim);

/// Wraps a coordinate into [-pi, pi).
double wrap_position(double x);

/// Central difference (f[j+1] - f[j-1]) / (2h) along `axis`, periodic.
GridFunction derivative(const GridFunction& f, int axis = 0);

/// Standard (2d+1)-point second difference Laplacian.
GridFunction laplacian(const GridFunction& f);

/// Riemann sum h^d * sum(values) of a scalar field.
double integral(const GridFunction& f);

/// Cumulative trapezoidal sum anchored at -pi with value 0 (1D only).
/// Periodic only if the integrand has zero integral.
GridFunction antiderivative(const GridFunction& f);

/// Approximates  integral f(y |> x) rho(y) dy  on the mesh. The kernel is
/// sampled at the mesh nodes (displacements); vector kernels give vector
/// results. Spectral implementation; requires an even number of points.
GridFunction circular_convolve(const GridFunction& kernel, const GridFunction& density);

/// O(N^2) direct summation with the same conventions as circular_convolve.
GridFunction circular_convolve_direct(const GridFunction& kernel, const GridFunction& density);

/// Periodic multilinear interpolation of every component at `x`.
Vec2 interpolate(const GridFunction& f, const Vec2& x);
double interpolate(const GridFunction& f, double x);

/// Solves lap(phi) = rhs with the Fourier symbol -|k|^2; returns the
/// zero-mean solution. Throws InvalidArgument when rhs has a nonzero mean.
GridFunction spectral_solve_poisson(const GridFunction& rhs);

/// Spectral gradient (i k) of a scalar field; Nyquist modes are dropped.
GridFunction spectral_gradient(const GridFunction& f);

/// Spectral divergence of a vector field; Nyquist modes are dropped.
GridFunction spectral_divergence(const GridFunction& v);

/// Spectral Laplacian (-|k|^2) of a scalar field.
GridFunction spectral_laplacian(const GridFunction& f);

/// Discrete L2 norm sqrt(h^d * sum v^2) over all components.
double l2_norm(const GridFunction& f);

// CSV serialization: a header line `# dim=<d> n=<n> components=<c>`, then
// one row per node in row-major order: coordinates, then component values,
// 17 significant digits. Lines starting with '#' before the header are
// treated as free-form comments.
void write_csv(std::ostream& os, const GridFunction& f);
void write_csv(const std::string& path, const GridFunction& f,
               const std::vector<std::string>& comment_lines = {});
GridFunction read_csv(std::istream& is);
GridFunction read_csv(const std::string& path);

}  // namespace densctl
