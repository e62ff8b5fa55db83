#include "densctl/lemma_ode.hpp"

#include <algorithm>
#include <cmath>

#include "densctl/error.hpp"

namespace densctl {

std::vector<Equilibrium> equilibria(const LemmaParams& p) {
  std::vector<Equilibrium> out;
  Equilibrium origin;
  origin.eigenvalues = {-p.alpha, -p.k};
  origin.type = (p.alpha > 0 && p.k > 0) ? EquilibriumType::stable_node : EquilibriumType::saddle;
  out.push_back(origin);
  if (p.delta > 0 && p.alpha > 0) {
    Equilibrium s;
    s.eta = (p.alpha * p.alpha) / (p.delta * p.delta);
    // d(eta')/d(eta) at xi = 0 is -alpha + 1.5 delta sqrt(eta) = alpha / 2
    s.eigenvalues = {0.5 * p.alpha, -p.k};
    s.type = EquilibriumType::saddle;
    out.push_back(s);
  }
  return out;
}

BasinEstimate basin_estimate(const LemmaParams& p) {
  if (!(p.delta > 0)) throw InvalidArgument("basin_estimate requires delta > 0");
  BasinEstimate est;
  const double b = p.beta - p.alpha;
  const double disc = b * b - 4.0 * p.gamma * p.delta;
  if (disc < 0) return est;
  const double sq = std::sqrt(disc);
  const double r1 = (-b - sq) / (2.0 * p.delta);
  const double r2 = (-b + sq) / (2.0 * p.delta);
  if (!(r2 > 0)) return est;
  est.eta_1 = r1 * r1;
  est.eta_2 = r2 * r2;
  est.basin_bound = est.eta_2;
  return est;
}

std::array<double, 2> lemma_rhs(const LemmaParams& p, double eta, double xi) {
  const double e = std::max(eta, 0.0);
  const double s = std::sqrt(e);
  return {(-p.alpha + p.beta * xi) * e + (p.gamma * xi + p.delta * e) * s, -p.k * xi};
}

namespace {

void rk4(const LemmaParams& p, double dt, double& eta, double& xi) {
  auto k1 = lemma_rhs(p, eta, xi);
  auto k2 = lemma_rhs(p, eta + 0.5 * dt * k1[0], xi + 0.5 * dt * k1[1]);
  auto k3 = lemma_rhs(p, eta + 0.5 * dt * k2[0], xi + 0.5 * dt * k2[1]);
  auto k4 = lemma_rhs(p, eta + dt * k3[0], xi + dt * k3[1]);
  eta += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
  xi += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  eta = std::max(eta, 0.0);
}

}  // namespace

LemmaTrajectory integrate(const LemmaParams& p, double eta0, const LemmaOptions& opts) {
  if (!(eta0 >= 0)) throw InvalidArgument("integrate: eta0 must be >= 0");
  if (!(opts.dt > 0)) throw InvalidArgument("integrate: dt must be positive");
  const double horizon = opts.horizon > 0 ? opts.horizon : 200.0 / p.k;
  const long steps = static_cast<long>(std::ceil(horizon / opts.dt));
  const double saddle = p.delta > 0 ? (p.alpha / p.delta) * (p.alpha / p.delta) : INFINITY;

  LemmaTrajectory tr;
  double eta = eta0, xi = 1.0, t = 0.0;
  auto record = [&] {
    tr.t.push_back(t);
    tr.eta.push_back(eta);
    tr.xi.push_back(xi);
  };
  if (opts.record_every > 0) record();
  for (long s = 0; s < steps; ++s) {
    rk4(p, opts.dt, eta, xi);
    t = (s + 1) * opts.dt;
    if (opts.record_every > 0 && (s + 1) % opts.record_every == 0) record();
    if (!std::isfinite(eta) || eta > opts.blowup) {
      tr.fate = Fate::diverges;
      break;
    }
    if (eta == 0.0 && xi < opts.xi_cutoff) {
      tr.fate = Fate::converges;
      break;
    }
    if (xi < opts.xi_cutoff) {
      if (eta < saddle && lemma_rhs(p, eta, xi)[0] < 0) {
        tr.fate = Fate::converges;
        break;
      }
      if (eta > saddle) {
        tr.fate = Fate::diverges;
        break;
      }
    }
  }
  tr.final_t = t;
  tr.final_eta = eta;
  tr.final_xi = xi;
  return tr;
}

LemmaTrajectory integrate_fixed(const LemmaParams& p, double eta0, double T, double dt) {
  if (!(eta0 >= 0)) throw InvalidArgument("integrate: eta0 must be >= 0");
  const long steps = static_cast<long>(std::llround(T / dt));
  LemmaTrajectory tr;
  double eta = eta0, xi = 1.0;
  tr.t.push_back(0.0);
  tr.eta.push_back(eta);
  tr.xi.push_back(xi);
  for (long s = 0; s < steps; ++s) {
    rk4(p, dt, eta, xi);
    tr.t.push_back((s + 1) * dt);
    tr.eta.push_back(eta);
    tr.xi.push_back(xi);
    if (!std::isfinite(eta) || eta > 1e12) {
      tr.fate = Fate::diverges;
      break;
    }
  }
  tr.final_t = tr.t.back();
  tr.final_eta = eta;
  tr.final_xi = xi;
  return tr;
}

}  // namespace densctl
