#include "densctl/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "densctl/error.hpp"
#include "densctl/spectral.hpp"

namespace densctl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridFunction log_of(const GridFunction& f) {
  GridFunction out(f.mesh());
  for (std::size_t i = 0; i < f.num_nodes(); ++i) out[i] = std::log(f[i]);
  return out;
}

void require_positive(const GridFunction& f, const char* what) {
  if (!(f.min() > 0)) throw InvalidArgument(std::string(what) + ": target density must be strictly positive");
}

// sum over axes of the vector field's componentwise central-difference divergence
GridFunction fd_divergence(const GridFunction& v) {
  const auto& mesh = v.mesh();
  GridFunction out(mesh);
  for (int a = 0; a < mesh.dim(); ++a) {
    GridFunction comp(mesh, 1, std::vector<double>(v.component(a).begin(), v.component(a).end()));
    out += derivative(comp, a);
  }
  return out;
}

GridFunction fd_gradient(const GridFunction& f) {
  const auto& mesh = f.mesh();
  GridFunction out(mesh, mesh.dim());
  for (int a = 0; a < mesh.dim(); ++a) {
    auto d = derivative(f, a);
    std::copy(d.values().begin(), d.values().end(), out.component(a).begin());
  }
  return out;
}

}  // namespace

bool FeasibilityReport::feasible_for(double M_L) const {
  return zero_set_ok && M_L > 0 && M_L < 1 && M_L >= M_hat_1 && M_L <= M_hat_2;
}

GridFunction steady_interaction_field(const TargetDensity& target, const GridFunction& ff_kernel, double D) {
  const auto& rho = target.profile;
  require_positive(rho, "steady_interaction_field");
  require_same_mesh(rho, ff_kernel, "steady_interaction_field");
  const auto& mesh = rho.mesh();
  GridFunction grad = fd_gradient(rho);
  GridFunction v = circular_convolve(ff_kernel, rho);
  GridFunction out(mesh, mesh.dim());
  for (int a = 0; a < mesh.dim(); ++a)
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) out.at(a, i) = D * grad.at(a, i) / rho[i] - v.at(a, i);
  return out;
}

FeasibilityReport theorem1_report(const TargetDensity& target, const GridFunction& ff_kernel, double fl_ell, double D,
                                  const FeasibilityOptions& opts) {
  const auto& rho_hat = target.normalized;
  const auto& mesh = rho_hat.mesh();
  if (mesh.dim() != 1) throw InvalidArgument("theorem1_report: 1D mesh required");
  require_positive(rho_hat, "theorem1_report");
  require_same_mesh(rho_hat, ff_kernel, "theorem1_report");
  if (!(fl_ell > 0) || !(D > 0)) throw InvalidArgument("theorem1_report: ell and D must be positive");

  FeasibilityReport r;
  r.D = D;
  r.fl_ell = fl_ell;
  const double inv_ell2 = 1.0 / (fl_ell * fl_ell);

  r.g2 = log_of(rho_hat);
  r.g1 = derivative(derivative(r.g2));
  r.v_ff_hat = circular_convolve(ff_kernel, rho_hat);
  r.g_F = antiderivative(r.v_ff_hat) * (0.5 * inv_ell2) - derivative(r.v_ff_hat) * 0.5;
  r.C = integral(r.g2);
  r.C_F = integral(r.g_F);

  r.h_F = r.g_F * -1.0;
  for (double& v : r.h_F.values()) v += r.C_F / kTwoPi;
  r.H = r.h_F;
  for (double& v : r.H.values()) v += 1.0 / kTwoPi;
  r.G = r.g1 * (-0.5 * D) + r.g2 * (0.5 * D * inv_ell2) + r.h_F;
  const double shift = D * r.C / (4.0 * kPi) * inv_ell2;
  for (double& v : r.G.values()) v -= shift;

  const double eps_H = opts.eps_H_rel * r.H.max_abs();
  const double eps_G = opts.eps_G_rel * r.G.max_abs();
  r.M_hat_1 = -kInf;
  r.M_hat_2 = kInf;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const double H = r.H[i];
    const double G = r.G[i];
    if (H > eps_H) {
      r.M_hat_1 = std::max(r.M_hat_1, G / H);
    } else if (H < -eps_H) {
      r.M_hat_2 = std::min(r.M_hat_2, G / H);
    } else if (G > eps_G) {
      r.zero_set_ok = false;
    }
  }
  return r;
}

LeaderSynthesis synthesize_leader_density_1d(const FeasibilityReport& report, const TargetDensity& target, double M_L,
                                             SynthesisMode mode) {
  const double M_F = target.mass;
  if (!(M_L > 0) || !(M_L < 1)) throw InvalidArgument("leader mass must lie in (0, 1)");
  if (std::abs(M_F + M_L - 1.0) > 1e-9) throw InvalidArgument("leader and follower masses must sum to one");
  const bool feasible = report.feasible_for(M_L);
  if (mode == SynthesisMode::strict && !feasible)
    throw InfeasibleError("leader mass " + std::to_string(M_L) + " is outside the feasible interval");

  const double D = report.D;
  const double inv_ell2 = 1.0 / (report.fl_ell * report.fl_ell);
  LeaderSynthesis out;
  out.B = (M_L + 0.5 * D * report.C * inv_ell2 - M_F * report.C_F) / kTwoPi;
  out.rho_L = report.g1 * (0.5 * D) - report.g2 * (0.5 * D * inv_ell2) + report.g_F * M_F;
  for (double& v : out.rho_L.values()) v += out.B;

  if (mode == SynthesisMode::fallback && out.rho_L.min() < -1e-9) {
    const double m = out.rho_L.min();
    for (double& v : out.rho_L.values()) v -= m;
    out.rho_L *= M_L / integral(out.rho_L);
    out.fallback_applied = true;
  }
  return out;
}

Deconvolution2D deconvolve_2d(const GridFunction& vfl, const GridFunction& fl_kernel, double M_L) {
  const auto& mesh = vfl.mesh();
  if (mesh.dim() != 2) throw InvalidArgument("deconvolve_2d: 2D mesh required");
  require_same_mesh(vfl, fl_kernel, "deconvolve_2d");
  if (vfl.components() != 2 || fl_kernel.components() != 2)
    throw InvalidArgument("deconvolve_2d: vector field and vector kernel required");

  KernelConvolver conv(fl_kernel);
  const auto& F0 = conv.spectrum(0);
  const auto& F1 = conv.spectrum(1);
  auto V0 = fft_forward(mesh, vfl.component(0));
  auto V1 = fft_forward(mesh, vfl.component(1));

  double fmax = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < F0.size(); ++i) {
    fmax = std::max(fmax, std::sqrt(std::norm(F0[i]) + std::norm(F1[i])));
    vmax = std::max(vmax, std::sqrt(std::norm(V0[i]) + std::norm(V1[i])));
  }
  std::vector<Complex> rho_hat(F0.size());
  for (std::size_t i = 1; i < F0.size(); ++i) {
    const double f2 = std::norm(F0[i]) + std::norm(F1[i]);
    const double vn = std::sqrt(std::norm(V0[i]) + std::norm(V1[i]));
    if (std::sqrt(f2) <= 1e-13 * fmax) {
      if (vn > 1e-10 * std::max(vmax, 1e-300) && vmax > 0) {
        auto k = wavevector(mesh, i);
        throw InvalidArgument("deconvolve_2d: kernel mode (" + std::to_string(k[0]) + ", " + std::to_string(k[1]) +
                              ") vanishes where the field does not");
      }
      continue;
    }
    rho_hat[i] = (std::conj(F0[i]) * V0[i] + std::conj(F1[i]) * V1[i]) / f2;
  }

  Deconvolution2D out;
  out.R = GridFunction(mesh, 1, fft_inverse_real(mesh, rho_hat));
  const double lift = -out.R.min();
  out.rho_L = out.R;
  for (double& v : out.rho_L.values()) v += lift;
  out.M_hat = integral(out.rho_L);
  const double area = kTwoPi * kTwoPi;
  out.feasible = out.M_hat <= M_L;
  if (out.feasible) {
    const double extra = (M_L - out.M_hat) / area;
    for (double& v : out.rho_L.values()) v += extra;
  } else {
    out.rho_L *= M_L / out.M_hat;
  }
  return out;
}

StabilityReport stability_report(const TargetDensity& target, const KernelSpec& ff, const KernelSpec& fl, double D,
                                 const GridFunction& rho_L0, double K) {
  const auto& rho = target.profile;
  const auto& mesh = rho.mesh();
  require_positive(rho, "stability_report");
  require_same_mesh(rho, rho_L0, "stability_report");

  StabilityReport s;
  GridFunction logr = log_of(rho);
  GridFunction g1 = fd_divergence(fd_gradient(logr));
  s.g1_inf = g1.max_abs();

  GridFunction f_ff = materialize(ff, mesh);
  GridFunction f_fl = materialize(fl, mesh);
  GridFunction f_ff_x = mesh.dim() == 1 ? materialize_derivative_1d(ff, mesh) : fd_divergence(f_ff);
  const double fx_norm = l2_norm(f_ff_x);
  s.F = 2.0 * (l2_norm(rho) * fx_norm + l2_norm(fd_gradient(rho)) * l2_norm(f_ff));
  s.condition_holds = D * (2.0 - s.g1_inf) > s.F;

  GridFunction v = circular_convolve(f_fl, rho_L0) + circular_convolve(f_ff, rho);
  GridFunction h1 = fd_divergence(v);
  GridFunction flux(mesh, mesh.dim());
  GridFunction grad = fd_gradient(rho);
  for (int a = 0; a < mesh.dim(); ++a)
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) flux.at(a, i) = rho[i] * v.at(a, i) - D * grad.at(a, i);
  GridFunction h2 = fd_divergence(flux);

  s.alpha = std::abs(-2.0 * D + D * s.g1_inf + s.F);
  s.beta = h1.max_abs();
  s.gamma = 2.0 * l2_norm(h2);
  s.delta = 0.5 * fx_norm;
  s.delta_alt = fx_norm;
  s.k = K;
  if (s.delta > 0) {
    auto est = basin_estimate({s.alpha, s.beta, s.gamma, s.delta, s.k});
    s.basin_eta_star = est.basin_bound;
  }
  return s;
}

LeaderCountBounds leader_count_bounds(double M_hat_1, double M_hat_2, std::int64_t N_F) {
  if (N_F < 1) throw InvalidArgument("leader_count_bounds: N_F must be >= 1");
  if (!(M_hat_1 < 1)) throw InvalidArgument("leader_count_bounds: no finite leader count reaches M_hat_1 >= 1");
  LeaderCountBounds b;
  // a relative slack of 1e-9 keeps exact ratios such as 0.25/0.75*375 from
  // rounding up to the next integer
  if (M_hat_1 > 0) {
    const double x = M_hat_1 / (1.0 - M_hat_1) * static_cast<double>(N_F);
    b.N_hat_1 = static_cast<std::int64_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
  }
  if (M_hat_2 < 1) {
    const double x = std::max(M_hat_2, 0.0) / (1.0 - M_hat_2) * static_cast<double>(N_F);
    b.N_hat_2 = static_cast<std::int64_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
  }
  return b;
}

}  // namespace densctl
