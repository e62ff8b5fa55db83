#include "densctl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "densctl/error.hpp"
#include "densctl/spectral.hpp"

namespace densctl {

PeriodicMesh::PeriodicMesh(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim != 1 && dim != 2) throw InvalidArgument("mesh dimension must be 1 or 2");
  if (points_per_axis < 2) throw InvalidArgument("mesh needs at least 2 points per axis");
  spacing_ = kTwoPi / points_per_axis;
}

double PeriodicMesh::cell_volume() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

std::size_t PeriodicMesh::num_nodes() const {
  return dim_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
}

Vec2 PeriodicMesh::node_point(std::size_t node) const {
  if (dim_ == 1) return {coord(static_cast<int>(node)), 0.0};
  return {coord(static_cast<int>(node / n_)), coord(static_cast<int>(node % n_))};
}

GridFunction::GridFunction(const PeriodicMesh& mesh, int components, double fill)
    : mesh_(mesh), components_(components), values_(mesh.num_nodes() * components, fill) {
  if (components < 1) throw InvalidArgument("GridFunction needs at least one component");
}

GridFunction::GridFunction(const PeriodicMesh& mesh, int components, std::vector<double> values)
    : mesh_(mesh), components_(components), values_(std::move(values)) {
  if (components < 1) throw InvalidArgument("GridFunction needs at least one component");
  if (values_.size() != mesh.num_nodes() * components)
    throw InvalidArgument("GridFunction: value count does not match mesh");
}

std::span<const double> GridFunction::component(int c) const {
  return std::span<const double>(values_).subspan(c * num_nodes(), num_nodes());
}

std::span<double> GridFunction::component(int c) {
  return std::span<double>(values_).subspan(c * num_nodes(), num_nodes());
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& rhs) {
  require_same_mesh(*this, rhs, "operator+=");
  if (rhs.components_ != components_) throw InvalidArgument("operator+=: component mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& rhs) {
  require_same_mesh(*this, rhs, "operator-=");
  if (rhs.components_ != components_) throw InvalidArgument("operator-=: component mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction lhs, const GridFunction& rhs) { return lhs += rhs; }
GridFunction operator-(GridFunction lhs, const GridFunction& rhs) { return lhs -= rhs; }
GridFunction operator*(GridFunction lhs, double s) { return lhs *= s; }
GridFunction operator*(double s, GridFunction rhs) { return rhs *= s; }

void require_same_mesh(const GridFunction& a, const GridFunction& b, const char* what) {
  if (!(a.mesh() == b.mesh())) throw InvalidArgument(std::string(what) + ": mesh mismatch");
}

double wrap_displacement(double x, double y) {
  double r = std::fmod(x - y + kPi, kTwoPi);
  if (r < 0) r += kTwoPi;
  r -= kPi;
  // fmod can return exactly 2pi - eps rounding to pi after the shift
  if (r >= kPi) r -= kTwoPi;
  return r;
}

Vec2 wrap_displacement(const Vec2& x, const Vec2& y, int dim) {
  Vec2 r{wrap_displacement(x[0], y[0]), 0.0};
  if (dim == 2) r[1] = wrap_displacement(x[1], y[1]);
  return r;
}

double wrap_position(double x) {
  if (x >= -kPi && x < kPi) return x;
  return wrap_displacement(x, 0.0);
}

GridFunction derivative(const GridFunction& f, int axis) {
  if (!f.is_scalar()) throw InvalidArgument("derivative: scalar field required");
  const auto& mesh = f.mesh();
  if (axis < 0 || axis >= mesh.dim()) throw InvalidArgument("derivative: bad axis");
  const int n = mesh.points_per_axis();
  const double inv = 1.0 / (2.0 * mesh.spacing());
  GridFunction out(mesh);
  if (mesh.dim() == 1) {
    for (int j = 0; j < n; ++j) out[j] = (f[(j + 1) % n] - f[(j + n - 1) % n]) * inv;
    return out;
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::size_t idx = static_cast<std::size_t>(a) * n + b;
      double plus, minus;
      if (axis == 0) {
        plus = f[static_cast<std::size_t>((a + 1) % n) * n + b];
        minus = f[static_cast<std::size_t>((a + n - 1) % n) * n + b];
      } else {
        plus = f[static_cast<std::size_t>(a) * n + (b + 1) % n];
        minus = f[static_cast<std::size_t>(a) * n + (b + n - 1) % n];
      }
      out[idx] = (plus - minus) * inv;
    }
  }
  return out;
}

GridFunction laplacian(const GridFunction& f) {
  if (!f.is_scalar()) throw InvalidArgument("laplacian: scalar field required");
  const auto& mesh = f.mesh();
  const int n = mesh.points_per_axis();
  const double inv = 1.0 / (mesh.spacing() * mesh.spacing());
  GridFunction out(mesh);
  if (mesh.dim() == 1) {
    for (int j = 0; j < n; ++j) out[j] = (f[(j + 1) % n] - 2.0 * f[j] + f[(j + n - 1) % n]) * inv;
    return out;
  }
  for (int a = 0; a < n; ++a) {
    const std::size_t up = static_cast<std::size_t>((a + 1) % n) * n;
    const std::size_t dn = static_cast<std::size_t>((a + n - 1) % n) * n;
    const std::size_t row = static_cast<std::size_t>(a) * n;
    for (int b = 0; b < n; ++b) {
      out[row + b] = (f[up + b] + f[dn + b] + f[row + (b + 1) % n] + f[row + (b + n - 1) % n] -
                      4.0 * f[row + b]) *
                     inv;
    }
  }
  return out;
}

double integral(const GridFunction& f) {
  if (!f.is_scalar()) throw InvalidArgument("integral: scalar field required");
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.mesh().cell_volume();
}

GridFunction antiderivative(const GridFunction& f) {
  if (f.mesh().dim() != 1 || !f.is_scalar()) throw InvalidArgument("antiderivative: 1D scalar field required");
  const int n = f.mesh().points_per_axis();
  const double h = f.mesh().spacing();
  GridFunction out(f.mesh());
  for (int j = 1; j < n; ++j) out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
  return out;
}

GridFunction circular_convolve(const GridFunction& kernel, const GridFunction& density) {
  require_same_mesh(kernel, density, "circular_convolve");
  return KernelConvolver(kernel).apply(density);
}

GridFunction circular_convolve_direct(const GridFunction& kernel, const GridFunction& density) {
  require_same_mesh(kernel, density, "circular_convolve_direct");
  if (!density.is_scalar()) throw InvalidArgument("circular_convolve_direct: density must be scalar");
  const auto& mesh = kernel.mesh();
  const int n = mesh.points_per_axis();
  if (n % 2 != 0) throw InvalidArgument("circular convolution requires an even number of points per axis");
  const int half = n / 2;
  const double w = mesh.cell_volume();
  GridFunction out(mesh, kernel.components());
  for (int c = 0; c < kernel.components(); ++c) {
    auto k = kernel.component(c);
    auto o = out.component(c);
    if (mesh.dim() == 1) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += k[((i - j + n) % n + half) % n] * density[j];
        o[i] = w * s;
      }
    } else {
      for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1) {
          double s = 0.0;
          for (int j0 = 0; j0 < n; ++j0) {
            const std::size_t krow = static_cast<std::size_t>(((i0 - j0 + n) % n + half) % n) * n;
            for (int j1 = 0; j1 < n; ++j1)
              s += k[krow + ((i1 - j1 + n) % n + half) % n] * density[static_cast<std::size_t>(j0) * n + j1];
          }
          o[static_cast<std::size_t>(i0) * n + i1] = w * s;
        }
    }
  }
  return out;
}

namespace {

struct Stencil {
  int lo;
  int hi;
  double frac;
};

Stencil locate(const PeriodicMesh& mesh, double x) {
  const int n = mesh.points_per_axis();
  double s = (wrap_position(x) + kPi) / mesh.spacing();
  int lo = static_cast<int>(std::floor(s));
  double frac = s - lo;
  lo = ((lo % n) + n) % n;
  return {lo, (lo + 1) % n, frac};
}

}  // namespace

Vec2 interpolate(const GridFunction& f, const Vec2& x) {
  const auto& mesh = f.mesh();
  const int n = mesh.points_per_axis();
  Vec2 result{0.0, 0.0};
  const int comps = std::min(f.components(), 2);
  if (mesh.dim() == 1) {
    Stencil s = locate(mesh, x[0]);
    for (int c = 0; c < comps; ++c) {
      auto v = f.component(c);
      result[c] = s.frac == 0.0 ? v[s.lo] : (1.0 - s.frac) * v[s.lo] + s.frac * v[s.hi];
    }
    return result;
  }
  Stencil a = locate(mesh, x[0]);
  Stencil b = locate(mesh, x[1]);
  for (int c = 0; c < comps; ++c) {
    auto v = f.component(c);
    auto at = [&](int i, int j) { return v[static_cast<std::size_t>(i) * n + j]; };
    double lo = b.frac == 0.0 ? at(a.lo, b.lo) : (1.0 - b.frac) * at(a.lo, b.lo) + b.frac * at(a.lo, b.hi);
    double hi = b.frac == 0.0 ? at(a.hi, b.lo) : (1.0 - b.frac) * at(a.hi, b.lo) + b.frac * at(a.hi, b.hi);
    result[c] = a.frac == 0.0 ? lo : (1.0 - a.frac) * lo + a.frac * hi;
  }
  return result;
}

double interpolate(const GridFunction& f, double x) { return interpolate(f, Vec2{x, 0.0})[0]; }

double l2_norm(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.mesh().cell_volume());
}

GridFunction spectral_laplacian(const GridFunction& f) {
  if (!f.is_scalar()) throw InvalidArgument("spectral_laplacian: scalar field required");
  const auto& mesh = f.mesh();
  auto spec = fft_forward(mesh, f.values());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    auto k = wavevector(mesh, i);
    spec[i] *= -static_cast<double>(k[0] * k[0] + k[1] * k[1]);
  }
  return GridFunction(mesh, 1, fft_inverse_real(mesh, spec));
}

GridFunction spectral_solve_poisson(const GridFunction& rhs) {
  if (!rhs.is_scalar()) throw InvalidArgument("spectral_solve_poisson: scalar field required");
  const auto& mesh = rhs.mesh();
  const double norm = l2_norm(rhs);
  if (std::abs(integral(rhs)) > 1e-8 * std::max(norm, 1e-300) && norm > 0.0)
    throw InvalidArgument("spectral_solve_poisson: right-hand side has nonzero mean");
  auto spec = fft_forward(mesh, rhs.values());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    auto k = wavevector(mesh, i);
    const int k2 = k[0] * k[0] + k[1] * k[1];
    spec[i] = k2 == 0 ? Complex(0.0, 0.0) : spec[i] / static_cast<double>(-k2);
  }
  return GridFunction(mesh, 1, fft_inverse_real(mesh, spec));
}

GridFunction spectral_gradient(const GridFunction& f) {
  if (!f.is_scalar()) throw InvalidArgument("spectral_gradient: scalar field required");
  const auto& mesh = f.mesh();
  auto spec = fft_forward(mesh, f.values());
  GridFunction out(mesh, mesh.dim());
  std::vector<Complex> tmp(spec.size());
  for (int axis = 0; axis < mesh.dim(); ++axis) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
      auto k = wavevector(mesh, i);
      tmp[i] = is_nyquist(mesh, i) ? Complex(0.0, 0.0) : Complex(0.0, k[axis]) * spec[i];
    }
    auto vals = fft_inverse_real(mesh, tmp);
    std::copy(vals.begin(), vals.end(), out.component(axis).begin());
  }
  return out;
}

GridFunction spectral_divergence(const GridFunction& v) {
  const auto& mesh = v.mesh();
  if (v.components() != mesh.dim()) throw InvalidArgument("spectral_divergence: vector field required");
  std::vector<Complex> acc(mesh.num_nodes());
  for (int axis = 0; axis < mesh.dim(); ++axis) {
    auto spec = fft_forward(mesh, v.component(axis));
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (is_nyquist(mesh, i)) continue;
      auto k = wavevector(mesh, i);
      acc[i] += Complex(0.0, k[axis]) * spec[i];
    }
  }
  return GridFunction(mesh, 1, fft_inverse_real(mesh, acc));
}

}  // namespace densctl
