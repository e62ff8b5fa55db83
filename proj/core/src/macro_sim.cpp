#include "densctl/macro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "densctl/error.hpp"
#include "densctl/spectral.hpp"

namespace densctl {
namespace {

GridFunction component_of(const GridFunction& v, int c) {
  auto s = v.component(c);
  return GridFunction(v.mesh(), 1, std::vector<double>(s.begin(), s.end()));
}

GridFunction divergence_fd(const GridFunction& flux) {
  const auto& mesh = flux.mesh();
  if (flux.components() == 1) return derivative(flux, 0);
  GridFunction out(mesh);
  for (int a = 0; a < mesh.dim(); ++a) out += derivative(component_of(flux, a), a);
  return out;
}

std::vector<std::vector<Complex>> kernel_spectra(const GridFunction& kernel) {
  KernelConvolver conv(kernel);
  std::vector<std::vector<Complex>> out;
  for (int c = 0; c < conv.components(); ++c) out.push_back(conv.spectrum(c));
  return out;
}

void require_finite(const GridFunction& f, const char* what, long step) {
  for (double v : f.values()) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << what << " became non-finite at step " << step << "; reduce dt";
      throw NumericalAbort(os.str());
    }
  }
}

}  // namespace

void MacroRunConfig::validate() const {
  const auto& mesh = rho_F_ref.mesh();
  for (const GridFunction* g : {&fl_kernel, &ff_kernel, &rho_L_ref, &rho_L0, &rho_F0})
    if (!(g->mesh() == mesh)) throw InvalidArgument("macro run: all fields must share one mesh");
  if (fl_kernel.components() != mesh.dim() || ff_kernel.components() != mesh.dim())
    throw InvalidArgument("macro run: kernels must have one component per dimension");
  if (!(dt > 0) || !(T >= 0)) throw InvalidArgument("macro run: dt must be positive and T nonnegative");
  if (!(D >= 0) || !(K > 0)) throw InvalidArgument("macro run: need D >= 0 and K > 0");
  if (output_stride < 1) throw InvalidArgument("macro run: output_stride must be >= 1");
  if (substeps < 0) throw InvalidArgument("macro run: substeps must be >= 0");
  if (law == ControlLaw::antiderivative && mesh.dim() != 1)
    throw InvalidArgument("macro run: the antiderivative control law is one-dimensional");
}

GridFunction control_flux_1d(const GridFunction& rho_L, const GridFunction& rho_L_ref, double K) {
  require_same_mesh(rho_L, rho_L_ref, "control_flux_1d");
  return antiderivative(rho_L_ref - rho_L) * -K;
}

GridFunction control_flux_poisson(const GridFunction& rho_L, const GridFunction& rho_L_ref, double K) {
  require_same_mesh(rho_L, rho_L_ref, "control_flux_poisson");
  const auto& mesh = rho_L.mesh();
  GridFunction e = rho_L_ref - rho_L;
  auto spec = fft_forward(mesh, e.values());
  GridFunction out(mesh, mesh.dim());
  std::vector<Complex> tmp(spec.size());
  for (int a = 0; a < mesh.dim(); ++a) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
      auto k = wavevector(mesh, i);
      const int k2 = k[0] * k[0] + k[1] * k[1];
      // -grad(phi), phi_hat = -K e_hat / |k|^2
      tmp[i] = (k2 == 0 || is_nyquist(mesh, i)) ? Complex(0.0, 0.0)
                                                 : Complex(0.0, k[a]) * spec[i] * (K / static_cast<double>(k2));
    }
    auto vals = fft_inverse_real(mesh, tmp);
    std::copy(vals.begin(), vals.end(), out.component(a).begin());
  }
  return out;
}

GridFunction velocity_from_flux(const GridFunction& flux, const GridFunction& rho_L, double floor) {
  require_same_mesh(flux, rho_L, "velocity_from_flux");
  GridFunction u(flux.mesh(), flux.components());
  for (std::size_t i = 0; i < rho_L.num_nodes(); ++i) {
    double fmag = 0.0;
    for (int c = 0; c < flux.components(); ++c) fmag = std::max(fmag, std::abs(flux.at(c, i)));
    if (rho_L[i] < floor) {
      if (fmag > floor) {
        std::ostringstream os;
        os << "leader density " << rho_L[i] << " below floor " << floor << " at node " << i
           << " while the control demands flux " << fmag;
        throw NumericalAbort(os.str());
      }
      continue;
    }
    for (int c = 0; c < flux.components(); ++c) u.at(c, i) = flux.at(c, i) / rho_L[i];
  }
  return u;
}

GridFunction control_field_1d(const SimState& state, const GridFunction& rho_L_ref, double K, double floor) {
  return velocity_from_flux(control_flux_1d(state.rho_L, rho_L_ref, K), state.rho_L, floor);
}

GridFunction control_field_2d(const SimState& state, const GridFunction& rho_L_ref, double K, double floor) {
  return velocity_from_flux(control_flux_poisson(state.rho_L, rho_L_ref, K), state.rho_L, floor);
}

MacroSimulator::MacroSimulator(MacroRunConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto& mesh = config_.rho_F_ref.mesh();
  const double h = mesh.spacing();
  const double ratio = mesh.dim() * config_.D * config_.dt / (h * h);
  if (config_.substeps > 0) {
    substeps_ = config_.substeps;
  } else {
    substeps_ = std::max(1, static_cast<int>(std::ceil(ratio / 0.45)));
  }
  if (ratio > 0.5) {
    std::ostringstream os;
    os << "diffusion number dim*D*dt/h^2 = " << ratio << " exceeds 0.5; using " << substeps_
       << " sub-steps per dt (sub-step number " << ratio / substeps_ << ")";
    notes_.push_back(os.str());
  }
  fl_hat_ = kernel_spectra(config_.fl_kernel);
  ff_hat_ = kernel_spectra(config_.ff_kernel);
}

SimState MacroSimulator::initial_state() const {
  SimState s;
  s.rho_L = config_.rho_L0;
  s.rho_F = config_.rho_F0;
  s.u = velocity_from_flux(leader_flux(s.rho_L), s.rho_L, config_.density_floor);
  return s;
}

GridFunction MacroSimulator::leader_flux(const GridFunction& rho_L) const {
  if (config_.law == ControlLaw::antiderivative) return control_flux_1d(rho_L, config_.rho_L_ref, config_.K);
  return control_flux_poisson(rho_L, config_.rho_L_ref, config_.K);
}

void MacroSimulator::substep(SimState& state, double ds) const {
  const auto& mesh = state.rho_F.mesh();
  const int dim = mesh.dim();
  GridFunction flux_L = leader_flux(state.rho_L);
  for (std::size_t i = 0; i < state.rho_L.num_nodes(); ++i) {
    if (state.rho_L[i] >= config_.density_floor) continue;
    for (int c = 0; c < dim; ++c) {
      if (std::abs(flux_L.at(c, i)) > config_.density_floor) {
        std::ostringstream os;
        os << "leader density fell below " << config_.density_floor << " at node " << i << ", step "
           << state.step_count << ", while the control demands nonzero flux";
        throw NumericalAbort(os.str());
      }
    }
  }

  auto rl_hat = fft_forward(mesh, state.rho_L.values());
  auto rf_hat = fft_forward(mesh, state.rho_F.values());
  GridFunction flux_F(mesh, dim);
  std::vector<Complex> acc(rl_hat.size());
  for (int c = 0; c < dim; ++c) {
    const auto& a = fl_hat_[c];
    const auto& b = ff_hat_[c];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = a[i] * rl_hat[i] + b[i] * rf_hat[i];
    auto v = fft_inverse_real(mesh, acc);
    auto out = flux_F.component(c);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = state.rho_F[i] * v[i];
  }

  GridFunction dL = divergence_fd(flux_L);
  GridFunction dF = divergence_fd(flux_F);
  GridFunction lap = laplacian(state.rho_F);
  for (std::size_t i = 0; i < state.rho_L.num_nodes(); ++i) {
    state.rho_L[i] -= ds * dL[i];
    state.rho_F[i] += ds * (config_.D * lap[i] - dF[i]);
  }
}

void MacroSimulator::step(SimState& state) const {
  const double ds = config_.dt / substeps_;
  for (int s = 0; s < substeps_; ++s) substep(state, ds);
  ++state.step_count;
  state.t = state.step_count * config_.dt;
  require_finite(state.rho_F, "follower density", state.step_count);
  require_finite(state.rho_L, "leader density", state.step_count);
  const double mn = state.rho_F.min();
  if (mn < -config_.negativity_tolerance) {
    std::ostringstream os;
    os << "follower density reached " << mn << " at step " << state.step_count << "; reduce dt";
    throw NumericalAbort(os.str());
  }
  state.u = velocity_from_flux(leader_flux(state.rho_L), state.rho_L, config_.density_floor);
}

DiagnosticSample MacroSimulator::diagnostics(const SimState& state) const {
  DiagnosticSample d;
  d.t = state.t;
  d.err_L = l2_error(state.rho_L, config_.rho_L_ref);
  d.err_F = l2_error(state.rho_F, config_.rho_F_ref);
  d.mass_L = integral(state.rho_L);
  d.mass_F = integral(state.rho_F);
  d.kl_F = kl_divergence(state.rho_F, config_.rho_F_ref);
  // a leader reference touching zero (infeasible fallback) has no finite KL
  d.kl_L = config_.rho_L_ref.min() > 0 ? kl_divergence(state.rho_L, config_.rho_L_ref)
                                       : std::numeric_limits<double>::quiet_NaN();
  return d;
}

MacroRunResult run(const MacroRunConfig& config) {
  MacroSimulator sim(config);
  MacroRunResult result;
  result.substeps = sim.substeps();
  result.notes = sim.notes();
  SimState state = sim.initial_state();
  const long steps = std::lround(config.T / config.dt);

  std::vector<double> snaps = config.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&] {
    while (next_snap < snaps.size() && state.t >= snaps[next_snap] - 1e-9 * config.dt) {
      result.snapshots.push_back(state);
      ++next_snap;
    }
  };

  DiagnosticSample first = sim.diagnostics(state);
  const double e0L = first.err_L, e0F = first.err_F;
  auto record = [&](DiagnosticSample d) {
    d.pct_L = percentage_error(d.err_L, e0L);
    d.pct_F = percentage_error(d.err_F, e0F);
    result.series.push_back(d);
  };
  record(first);
  take_snapshots();
  for (long s = 0; s < steps; ++s) {
    sim.step(state);
    if (state.step_count % config.output_stride == 0 || s + 1 == steps) record(sim.diagnostics(state));
    take_snapshots();
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace densctl
