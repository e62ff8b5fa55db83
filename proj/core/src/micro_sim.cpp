#include "densctl/micro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "densctl/error.hpp"

namespace densctl {

PointKernel::PointKernel(const KernelSpec& spec, int table_points) : spec_(spec), dim_(spec.dim) {
  spec.validate();
  zero_ = spec.kind == KernelKind::none;
  if (dim_ == 2 && !zero_) {
    if (table_points % 2 != 0 || table_points < 4) throw InvalidArgument("kernel table needs an even size >= 4");
    table_ = materialize(spec, PeriodicMesh(2, table_points));
    n_ = table_points;
    inv_h_ = table_points / kTwoPi;
  }
}

PointKernel::PointKernel(const GridFunction& table) : dim_(2), zero_(false), table_(table) {
  if (table.mesh().dim() != 2 || table.components() != 2)
    throw InvalidArgument("PointKernel: a 2D vector table is required");
  spec_.dim = 2;
  n_ = table.mesh().points_per_axis();
  inv_h_ = n_ / kTwoPi;
}

Vec2 PointKernel::operator()(const Vec2& d) const {
  if (zero_) return {0.0, 0.0};
  if (dim_ == 1) return {eval_1d(spec_, d[0]), 0.0};
  double s0 = (d[0] + kPi) * inv_h_;
  double s1 = (d[1] + kPi) * inv_h_;
  int i0 = static_cast<int>(std::floor(s0));
  int i1 = static_cast<int>(std::floor(s1));
  const double f0 = s0 - i0;
  const double f1 = s1 - i1;
  i0 = ((i0 % n_) + n_) % n_;
  i1 = ((i1 % n_) + n_) % n_;
  const int j0 = (i0 + 1) % n_;
  const int j1 = (i1 + 1) % n_;
  const std::size_t nn = static_cast<std::size_t>(n_) * n_;
  const double* v = table_.values().data();
  auto bil = [&](const double* c) {
    const double a = c[static_cast<std::size_t>(i0) * n_ + i1];
    const double b = c[static_cast<std::size_t>(i0) * n_ + j1];
    const double e = c[static_cast<std::size_t>(j0) * n_ + i1];
    const double g = c[static_cast<std::size_t>(j0) * n_ + j1];
    return (1.0 - f0) * ((1.0 - f1) * a + f1 * b) + f0 * ((1.0 - f1) * e + f1 * g);
  };
  return {bil(v), bil(v + nn)};
}

std::vector<AgentNoise> make_noise_streams(std::uint64_t seed, std::size_t followers) {
  std::vector<AgentNoise> out(followers);
  for (std::size_t id = 0; id < followers; ++id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 1u,
                      static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(static_cast<std::uint64_t>(id) >> 32)};
    out[id].engine.seed(seq);
  }
  return out;
}

std::vector<Vec2> equally_spaced(std::size_t count, int dim) {
  std::vector<Vec2> out(count, Vec2{0.0, 0.0});
  if (count == 0) return out;
  if (dim == 1) {
    for (std::size_t k = 0; k < count; ++k) out[k][0] = -kPi + (k + 0.5) * kTwoPi / count;
    return out;
  }
  const std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  const std::size_t rows = (count + cols - 1) / cols;
  for (std::size_t k = 0; k < count; ++k) {
    out[k][0] = -kPi + (k / cols + 0.5) * kTwoPi / rows;
    out[k][1] = -kPi + (k % cols + 0.5) * kTwoPi / cols;
  }
  return out;
}

std::vector<Vec2> follower_drift(const AgentState& state, const PointKernel& fl, const PointKernel& ff) {
  const int dim = state.dim;
  const double inv_n = 1.0 / static_cast<double>(state.leaders.size() + state.followers.size());
  std::vector<Vec2> out(state.followers.size(), Vec2{0.0, 0.0});
  for (std::size_t k = 0; k < state.followers.size(); ++k) {
    const Vec2& x = state.followers[k];
    double s0 = 0.0, s1 = 0.0;
    for (const Vec2& y : state.leaders) {
      Vec2 v = fl(wrap_displacement(x, y, dim));
      s0 += v[0];
      s1 += v[1];
    }
    for (std::size_t m = 0; m < state.followers.size(); ++m) {
      if (m == k) continue;
      Vec2 v = ff(wrap_displacement(x, state.followers[m], dim));
      s0 += v[0];
      s1 += v[1];
    }
    out[k] = {s0 * inv_n, s1 * inv_n};
  }
  return out;
}

std::vector<Vec2> follower_drift_pairwise(const AgentState& state, const PointKernel& fl, const PointKernel& ff) {
  const int dim = state.dim;
  const std::size_t nf = state.followers.size();
  const double inv_n = 1.0 / static_cast<double>(state.leaders.size() + nf);
  std::vector<Vec2> acc(nf, Vec2{0.0, 0.0});
  if (!fl.zero()) {
    for (std::size_t k = 0; k < nf; ++k)
      for (const Vec2& y : state.leaders) {
        Vec2 v = fl(wrap_displacement(state.followers[k], y, dim));
        acc[k][0] += v[0];
        acc[k][1] += v[1];
      }
  }
  if (!ff.zero()) {
    for (std::size_t k = 0; k < nf; ++k)
      for (std::size_t m = k + 1; m < nf; ++m) {
        Vec2 v = ff(wrap_displacement(state.followers[k], state.followers[m], dim));
        acc[k][0] += v[0];
        acc[k][1] += v[1];
        acc[m][0] -= v[0];
        acc[m][1] -= v[1];
      }
  }
  for (auto& a : acc) a = {a[0] * inv_n, a[1] * inv_n};
  return acc;
}

namespace {

// Sorted merge of periodic source copies and query probes, reusable for
// several kernel lengths.
class RepulsiveSweep {
 public:
  RepulsiveSweep(const std::vector<double>& sources, const std::vector<double>& queries) : nq_(queries.size()) {
    std::vector<double> ext;
    ext.reserve(3 * sources.size());
    for (double y : sources) {
      ext.push_back(y - kTwoPi);
      ext.push_back(y);
      ext.push_back(y + kTwoPi);
    }
    std::sort(ext.begin(), ext.end());
    // probe p = 3q + {0: z, 1: z - pi, 2: z + pi}
    std::vector<std::pair<double, int>> probes;
    probes.reserve(3 * nq_);
    for (std::size_t q = 0; q < nq_; ++q) {
      probes.emplace_back(queries[q], static_cast<int>(3 * q));
      probes.emplace_back(queries[q] - kPi, static_cast<int>(3 * q + 1));
      probes.emplace_back(queries[q] + kPi, static_cast<int>(3 * q + 2));
    }
    std::sort(probes.begin(), probes.end());
    eq_.assign(3 * nq_, 0);
    for (const auto& [x, id] : probes) {
      auto r = std::equal_range(ext.begin(), ext.end(), x);
      eq_[id] = static_cast<int>(r.second - r.first);
    }
    // ties: probes first, so forward sums exclude coincident sources
    events_.reserve(ext.size() + probes.size());
    std::size_t i = 0, j = 0;
    while (i < ext.size() || j < probes.size()) {
      if (j < probes.size() && (i == ext.size() || probes[j].first <= ext[i])) {
        events_.push_back({probes[j].first, probes[j].second});
        ++j;
      } else {
        events_.push_back({ext[i], -1});
        ++i;
      }
    }
  }

  std::vector<double> sum(double ell) const {
    const std::size_t ne = events_.size();
    std::vector<double> decay(ne, 0.0);
    for (std::size_t e = 1; e < ne; ++e) decay[e] = std::exp(-(events_[e].x - events_[e - 1].x) / ell);

    std::vector<double> P(3 * nq_), Q(3 * nq_);
    double r = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
      r *= decay[e];
      if (events_[e].probe < 0) r += 1.0;
      else P[events_[e].probe] = r;
    }
    // backward over groups of equal position: record probes before adding the
    // group's sources, so backward sums exclude coincident sources too
    r = 0.0;
    std::size_t e = ne;
    while (e > 0) {
      std::size_t g = e;
      const double x = events_[e - 1].x;
      while (g > 0 && events_[g - 1].x == x) --g;
      if (e < ne) r *= std::exp(-(events_[e].x - x) / ell);
      double added = 0.0;
      for (std::size_t k = g; k < e; ++k)
        if (events_[k].probe < 0) added += 1.0;
      for (std::size_t k = g; k < e; ++k)
        if (events_[k].probe >= 0) Q[events_[k].probe] = r;
      r += added;
      e = g;
    }

    const double E = std::exp(-kPi / ell);
    const double denom = -std::expm1(-kTwoPi / ell);
    const double a = 1.0 / denom;
    const double b = E / denom;
    std::vector<double> out(nq_);
    for (std::size_t q = 0; q < nq_; ++q) {
      const std::size_t c = 3 * q, lo = 3 * q + 1, hi = 3 * q + 2;
      const double p_s = P[c], p_i = P[c] + eq_[c];
      const double q_s = Q[c], q_i = Q[c] + eq_[c];
      const double left = a * (p_s - E * P[lo]) - b * (Q[lo] + eq_[lo] - E * q_i);
      const double right = a * (q_s - E * Q[hi]) - b * (P[hi] + eq_[hi] - E * p_i);
      out[q] = left - right;
    }
    return out;
  }

 private:
  struct Event {
    double x;
    int probe;
  };
  std::size_t nq_;
  std::vector<int> eq_;
  std::vector<Event> events_;
};

void accumulate(std::vector<Vec2>& acc, const RepulsiveSweep& sweep, const KernelSpec& spec) {
  auto add = [&](double ell, double w) {
    auto s = sweep.sum(ell);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k][0] += w * s[k];
  };
  switch (spec.kind) {
    case KernelKind::none: break;
    case KernelKind::repulsive: add(spec.ell, 1.0); break;
    case KernelKind::morse:
      add(spec.ell_r, 1.0 / spec.ell_r);
      if (spec.zeta != 0.0) add(spec.ell_a, -spec.zeta / spec.ell_a);
      break;
  }
}

}  // namespace

std::vector<double> repulsive_sum_1d(double ell, const std::vector<double>& sources,
                                     const std::vector<double>& queries) {
  return RepulsiveSweep(sources, queries).sum(ell);
}

std::vector<Vec2> follower_drift_fast_1d(const AgentState& state, const KernelSpec& fl, const KernelSpec& ff) {
  if (state.dim != 1) throw InvalidArgument("follower_drift_fast_1d: 1D agents required");
  std::vector<double> xf(state.followers.size()), xl(state.leaders.size());
  for (std::size_t k = 0; k < xf.size(); ++k) xf[k] = state.followers[k][0];
  for (std::size_t k = 0; k < xl.size(); ++k) xl[k] = state.leaders[k][0];
  std::vector<Vec2> acc(xf.size(), Vec2{0.0, 0.0});
  if (fl.kind != KernelKind::none && !xl.empty()) accumulate(acc, RepulsiveSweep(xl, xf), fl);
  if (ff.kind != KernelKind::none) accumulate(acc, RepulsiveSweep(xf, xf), ff);
  const double inv_n = 1.0 / static_cast<double>(xf.size() + xl.size());
  for (auto& a : acc) a[0] *= inv_n;
  return acc;
}

std::vector<Vec2> collocate(const GridFunction& u_field, const std::vector<Vec2>& leaders) {
  std::vector<Vec2> out(leaders.size());
  for (std::size_t i = 0; i < leaders.size(); ++i) out[i] = interpolate(u_field, leaders[i]);
  return out;
}

namespace {

// I_m(kappa) / I_0(kappa) for m = 0.. until the ratio drops below 1e-17.
const std::vector<double>& bessel_ratios(double kappa) {
  static std::mutex mutex;
  static std::map<double, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(kappa);
  if (it != cache.end()) return it->second;
  std::vector<double> r{1.0};
  const double i0 = std::cyl_bessel_i(0.0, kappa);
  for (int m = 1; m < 100000; ++m) {
    const double v = std::cyl_bessel_i(static_cast<double>(m), kappa) / i0;
    if (v < 1e-17) break;
    r.push_back(v);
  }
  return cache.emplace(kappa, std::move(r)).first->second;
}

void check_bridge(const std::vector<Vec2>& positions, const BridgeConfig& bridge) {
  if (positions.empty()) throw InvalidArgument("kde: empty position set");
  if (!(bridge.kde_concentration > 0)) throw InvalidArgument("kde: concentration must be positive");
}

// Unit-mass von Mises profile on one mesh axis, centered at c.
std::vector<double> vm_axis(const PeriodicMesh& mesh, double c, double kappa, double norm) {
  const int n = mesh.points_per_axis();
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = norm * std::exp(kappa * (std::cos(mesh.coord(j) - c) - 1.0));
  return out;
}

}  // namespace

GridFunction kde_direct(const std::vector<Vec2>& positions, double mass, const BridgeConfig& bridge) {
  check_bridge(positions, bridge);
  const auto& mesh = bridge.mesh;
  const double kappa = bridge.kde_concentration;
  // e^{kappa(cos - 1)} / (2 pi I0(kappa) e^{-kappa})
  const double norm = 1.0 / (kTwoPi * std::cyl_bessel_i(0.0, kappa) * std::exp(-kappa));
  const double w = mass / static_cast<double>(positions.size());
  GridFunction out(mesh);
  const int n = mesh.points_per_axis();
  for (const Vec2& p : positions) {
    auto a = vm_axis(mesh, p[0], kappa, norm);
    if (mesh.dim() == 1) {
      for (int j = 0; j < n; ++j) out[j] += w * a[j];
    } else {
      auto b = vm_axis(mesh, p[1], kappa, norm);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] += w * a[i] * b[j];
    }
  }
  return out;
}

GridFunction kde(const std::vector<Vec2>& positions, double mass, const BridgeConfig& bridge) {
  check_bridge(positions, bridge);
  const auto& mesh = bridge.mesh;
  const double kappa = bridge.kde_concentration;
  GridFunction out(mesh);
  if (mesh.dim() == 2 || kappa > 700.0) {
    out = kde_direct(positions, mass, bridge);
  } else {
    // Fourier series: VM(x; c) = (1/2pi)(1 + 2 sum_m r_m cos(m (x - c)))
    const auto& r = bessel_ratios(kappa);
    const std::size_t M = r.size() - 1;
    std::vector<std::complex<double>> coef(M + 1);
    for (const Vec2& p : positions) {
      const std::complex<double> step = std::polar(1.0, -p[0]);
      std::complex<double> z = 1.0;
      for (std::size_t m = 1; m <= M; ++m) {
        z *= step;
        coef[m] += z;
      }
    }
    const double npos = static_cast<double>(positions.size());
    const double w = mass / npos / kTwoPi;
    const int n = mesh.points_per_axis();
    for (int j = 0; j < n; ++j) {
      const std::complex<double> step = std::polar(1.0, mesh.coord(j));
      std::complex<double> z = 1.0;
      double s = npos;
      for (std::size_t m = 1; m <= M; ++m) {
        z *= step;
        s += 2.0 * r[m] * (coef[m] * z).real();
      }
      out[j] = w * s;
    }
  }
  const double total = integral(out);
  if (total > 0) out *= mass / total;
  return out;
}

void step_euler_maruyama(AgentState& state, const std::vector<Vec2>& drift, const std::vector<Vec2>& leader_velocity,
                         const MicroStepInput& in) {
  if (!(in.dt > 0)) throw InvalidArgument("step_euler_maruyama: dt must be positive");
  if (drift.size() != state.followers.size() || leader_velocity.size() != state.leaders.size())
    throw InvalidArgument("step_euler_maruyama: size mismatch");
  if (in.D > 0 && state.noise.size() != state.followers.size())
    throw InvalidArgument("step_euler_maruyama: one noise stream per follower is required");
  const double sigma = std::sqrt(2.0 * in.D * in.dt);
  const int dim = state.dim;
  for (std::size_t k = 0; k < state.followers.size(); ++k) {
    Vec2& x = state.followers[k];
    for (int c = 0; c < dim; ++c) {
      double dx = drift[k][c] * in.dt;
      if (sigma > 0) dx += sigma * state.noise[k].normal(state.noise[k].engine);
      x[c] = wrap_position(x[c] + dx);
    }
  }
  for (std::size_t i = 0; i < state.leaders.size(); ++i)
    for (int c = 0; c < dim; ++c)
      state.leaders[i][c] = wrap_position(state.leaders[i][c] + leader_velocity[i][c] * in.dt);
  ++state.step_count;
  state.t = state.step_count * in.dt;
}

GridFunction micro_control_field(const GridFunction& rho_L_est, const MicroRunConfig& cfg) {
  GridFunction flux = cfg.law == ControlLaw::antiderivative ? control_flux_1d(rho_L_est, cfg.rho_L_ref, cfg.K)
                                                            : control_flux_poisson(rho_L_est, cfg.rho_L_ref, cfg.K);
  GridFunction u(flux.mesh(), flux.components());
  for (std::size_t i = 0; i < rho_L_est.num_nodes(); ++i) {
    const double rho = std::max(rho_L_est[i], cfg.density_floor);
    for (int c = 0; c < flux.components(); ++c) u.at(c, i) = flux.at(c, i) / rho;
  }
  return u;
}

MicroRunResult run_micro(const MicroRunConfig& cfg) {
  if (cfg.dim != 1 && cfg.dim != 2) throw InvalidArgument("run_micro: dim must be 1 or 2");
  if (cfg.leaders0.empty() || cfg.followers0.empty()) throw InvalidArgument("run_micro: need leaders and followers");
  if (!(cfg.dt > 0) || cfg.output_stride < 1) throw InvalidArgument("run_micro: bad time grid");
  if (!(cfg.bridge.mesh == cfg.rho_F_ref.mesh()) || !(cfg.bridge.mesh == cfg.rho_L_ref.mesh()))
    throw InvalidArgument("run_micro: references must live on the estimation mesh");
  if (cfg.bridge.mesh.dim() != cfg.dim) throw InvalidArgument("run_micro: estimation mesh dimension mismatch");
  if (cfg.law == ControlLaw::antiderivative && cfg.dim != 1)
    throw InvalidArgument("run_micro: the antiderivative control law is one-dimensional");

  const double total = static_cast<double>(cfg.leaders0.size() + cfg.followers0.size());
  const double M_L = cfg.leaders0.size() / total;
  const double M_F = cfg.followers0.size() / total;

  AgentState state;
  state.dim = cfg.dim;
  state.seed = cfg.seed;
  state.leaders = cfg.leaders0;
  state.followers = cfg.followers0;
  for (auto* group : {&state.leaders, &state.followers})
    for (auto& p : *group)
      for (int c = 0; c < cfg.dim; ++c) p[c] = wrap_position(p[c]);
  state.noise = make_noise_streams(cfg.seed, state.followers.size());

  const bool fast = cfg.dim == 1;
  PointKernel fl, ff;
  if (!fast) {
    fl = PointKernel(cfg.fl, cfg.kernel_table_points);
    ff = PointKernel(cfg.ff, cfg.kernel_table_points);
  }

  MicroRunResult result;
  DiagnosticSample first;
  bool have_first = false;
  auto diagnose = [&](const GridFunction& est_L) {
    GridFunction est_F = kde(state.followers, M_F, cfg.bridge);
    DiagnosticSample d;
    d.t = state.t;
    d.err_L = l2_error(est_L, cfg.rho_L_ref);
    d.err_F = l2_error(est_F, cfg.rho_F_ref);
    d.kl_F = kl_divergence(est_F, cfg.rho_F_ref);
    d.kl_L = cfg.rho_L_ref.min() > 0 ? kl_divergence(est_L, cfg.rho_L_ref) : std::nan("");
    d.mass_L = integral(est_L);
    d.mass_F = integral(est_F);
    if (!have_first) {
      first = d;
      have_first = true;
    }
    d.pct_L = percentage_error(d.err_L, first.err_L);
    d.pct_F = percentage_error(d.err_F, first.err_F);
    result.series.push_back(d);
  };

  std::vector<double> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&] {
    while (next_snap < snaps.size() && state.t >= snaps[next_snap] - 1e-9 * cfg.dt) {
      AgentState copy = state;
      copy.noise.clear();
      result.snapshots.push_back(std::move(copy));
      ++next_snap;
    }
  };

  const long steps = std::lround(cfg.T / cfg.dt);
  const MicroStepInput in{cfg.dt, cfg.D};
  GridFunction est_L = kde(state.leaders, M_L, cfg.bridge);
  diagnose(est_L);
  take_snapshots();
  for (long s = 0; s < steps; ++s) {
    GridFunction u = micro_control_field(est_L, cfg);
    auto vel = collocate(u, state.leaders);
    auto drift = fast ? follower_drift_fast_1d(state, cfg.fl, cfg.ff) : follower_drift_pairwise(state, fl, ff);
    step_euler_maruyama(state, drift, vel, in);
    est_L = kde(state.leaders, M_L, cfg.bridge);
    if (state.step_count % cfg.output_stride == 0 || s + 1 == steps) diagnose(est_L);
    take_snapshots();
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace densctl
