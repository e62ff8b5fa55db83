// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "densctl/config.hpp"
#include "densctl/feasibility.hpp"
#include "densctl/grid.hpp"
#include "densctl/kernels.hpp"
#include "densctl/lemma_ode.hpp"
#include "densctl/macro_sim.hpp"
#include "densctl/metrics.hpp"
#include "densctl/micro_sim.hpp"
#include "modes.hpp"
#include "scenario.hpp"

using namespace densctl;

namespace {

// Pinned tolerances.
constexpr double kThresholdTol1 = 0.02;
constexpr double kThresholdTol2 = 0.03;
constexpr double kSweepFloorRel = 1e-3;     // of ||rho_F_ref||_2
constexpr double kSweepOutsideFactor = 10.0;
constexpr double kSweepOutsideMargin = 0.05;
constexpr double kRegulationFinalFrac = 0.05;
constexpr double kLeaderDecayTol = 0.02;
constexpr double kLeaderDecayWindow = 5.0;
constexpr double kTransientEnd = 5.0;       // 5 / K
constexpr double kMassDriftPer1e4 = 1e-9;
constexpr double kRoundTripTol = 1e-6;
constexpr int kRoundTripMesh1D = 4000;
constexpr int kRoundTripMesh2D = 64;
constexpr int kBasinTuples = 1000;
constexpr double kBasinLimitTol = 1e-12;
constexpr int kConvolutionInstances = 200;
constexpr double kConvolutionTol = 1e-10;
constexpr int kMicroAgents = 500;
constexpr int kMicroSeeds = 20;
constexpr double kConsistencyTol = 1e-6;
constexpr double kTrialDecreaseFrac = 0.8;
constexpr double kTrialPlateauSpread = 0.25;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

int jobs() { return app::resolve_jobs(std::nullopt); }

// ---------------------------------------------------------------------------
// Scenarios

struct Named {
  char tag;
  std::string text;
};

const std::vector<Named>& scenarios() {
  static const std::vector<Named> s = {
      {'a', "domain.n = 500\ntarget.kappa = 1\nkernels.ff.kind = none\nphysics.D = 0.04\ncontrol.K = 1\n"},
      {'b', "domain.n = 500\ntarget.kappa = 1\nkernels.ff.kind = morse\nkernels.ff.ell_r = pi/2\nkernels.ff.ell_a = pi\n"
            "kernels.ff.zeta = 1\nphysics.D = 0.02\ncontrol.K = 1\n"},
      {'c', "domain.n = 500\ntarget.kappa = 2\nkernels.ff.kind = morse\nkernels.ff.ell_r = pi/15\nkernels.ff.ell_a = pi/2\n"
            "kernels.ff.zeta = 2\nphysics.D = 0.16\ncontrol.K = 1\n"},
  };
  return s;
}

ScenarioConfig macro_cfg(const Named& s, double M_L, double T, const std::string& init) {
  std::ostringstream os;
  os.precision(17);
  os << "mode = macro\n" << s.text << "masses.M_L = " << M_L << "\nmasses.M_F = " << 1.0 - M_L << "\ntime.T = " << T
     << "\ntime.output_stride = 100\nfeasibility.fallback = true\ninitial.leaders = " << init
     << "\ninitial.followers = " << (init == "reference" ? "target" : init) << "\n";
  return parse_config(os.str());
}

FeasibilityReport thresholds(const Named& s) {
  auto cfg = parse_config("mode = macro\nmasses.M_L = 0.5\nmasses.M_F = 0.5\n" + s.text);
  auto sc = app::build_scenario(cfg);
  return theorem1_report(sc.target, sc.ff_kernel, cfg.fl_ell, cfg.D);
}

// M_L grid shared by the macro and micro sweeps: multiples of 1/500 so that
// both models see the same leader fraction.
std::vector<double> sweep_grid(double M1, double M2) {
  std::set<int> counts;
  for (double m : {0.05, 0.08, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) counts.insert(std::lround(m * kMicroAgents));
  for (double t : {M1, M2})
    if (t > 0 && t < 1)
      for (double d : {-0.02, 0.02}) {
        const double m = t + d;
        if (m > 0.01 && m < 0.99) counts.insert(std::lround(m * kMicroAgents));
      }
  std::vector<double> out;
  for (int c : counts) out.push_back(static_cast<double>(c) / kMicroAgents);
  return out;
}

enum class Where { inside, outside, margin };

Where classify(double M, double M1, double M2) {
  const double hi = std::min(M2, 1.0);
  if (M > M1 && M < hi) return Where::inside;
  if (M <= M1 - kSweepOutsideMargin || M >= hi + kSweepOutsideMargin) return Where::outside;
  return Where::margin;
}

struct MacroPoint {
  double M_L = 0;
  double final_err = 0;
  double max_err = 0;
  double ref_norm = 0;
  double drift_per_1e4 = 0;
};

// Macro runs shared by criteria 2, 4, 5 and 9.
std::map<char, std::vector<MacroPoint>>& macro_sweeps() {
  static std::map<char, std::vector<MacroPoint>> cache;
  if (!cache.empty()) return cache;
  for (const auto& s : scenarios()) {
    auto r = thresholds(s);
    auto grid = sweep_grid(r.M_hat_1, r.M_hat_2);
    std::vector<MacroPoint> pts(grid.size());
    app::parallel_for(grid.size(), jobs(), [&](std::size_t i) {
      auto cfg = macro_cfg(s, grid[i], 100.0, "reference");
      auto sc = app::build_scenario(cfg);
      auto ref = app::leader_reference(cfg, sc, grid[i]);
      auto mc = app::macro_config(cfg, sc, ref, grid[i]);
      auto res = run(mc);
      MacroPoint p;
      p.M_L = grid[i];
      p.final_err = res.series.back().err_F;
      for (const auto& d : res.series) p.max_err = std::max(p.max_err, d.err_F);
      p.ref_norm = l2_norm(mc.rho_F_ref);
      const double steps = static_cast<double>(res.final_state.step_count);
      const auto& a = res.series.front();
      const auto& b = res.series.back();
      const double drift = std::max(std::abs(b.mass_L - a.mass_L) / a.mass_L, std::abs(b.mass_F - a.mass_F) / a.mass_F);
      p.drift_per_1e4 = drift * 1e4 / std::max(steps, 1.0);
      pts[i] = p;
    });
    cache[s.tag] = pts;
  }
  return cache;
}

double worst_drift_seen = 0.0;
std::mutex drift_mutex;

void note_drift(const MacroRunResult& r) {
  const auto& a = r.series.front();
  const auto& b = r.series.back();
  const double d = std::max(std::abs(b.mass_L - a.mass_L) / a.mass_L, std::abs(b.mass_F - a.mass_F) / a.mass_F) * 1e4 /
                   std::max(1.0, static_cast<double>(r.final_state.step_count));
  std::lock_guard<std::mutex> lock(drift_mutex);
  worst_drift_seen = std::max(worst_drift_seen, d);
}

// ---------------------------------------------------------------------------
// Criteria

Verdict criterion1() {
  auto a = thresholds(scenarios()[0]);
  auto b = thresholds(scenarios()[1]);
  auto c = thresholds(scenarios()[2]);
  const bool ok = std::abs(a.M_hat_1 - 0.14) <= kThresholdTol1 && a.M_hat_2 > 1 &&
                  std::abs(b.M_hat_1 - 0.24) <= kThresholdTol1 && std::abs(c.M_hat_1 - 0.25) <= kThresholdTol1 &&
                  std::abs(c.M_hat_2 - 0.63) <= kThresholdTol2;
  return {ok, "(a) M1=" + fmt(a.M_hat_1) + " M2=" + fmt(a.M_hat_2) + "; (b) M1=" + fmt(b.M_hat_1) + "; (c) M1=" +
                  fmt(c.M_hat_1) + " M2=" + fmt(c.M_hat_2)};
}

Verdict criterion2() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& s : scenarios()) {
    auto r = thresholds(s);
    int inside = 0, outside = 0, bad = 0;
    for (const auto& p : macro_sweeps()[s.tag]) {
      const double floor = kSweepFloorRel * p.ref_norm;
      switch (classify(p.M_L, r.M_hat_1, r.M_hat_2)) {
        case Where::inside:
          ++inside;
          if (!(p.final_err <= floor)) ++bad, os << " [" << s.tag << " M_L=" << p.M_L << " err=" << fmt(p.final_err) << " > floor]";
          break;
        case Where::outside:
          ++outside;
          if (!(p.final_err >= kSweepOutsideFactor * floor))
            ++bad, os << " [" << s.tag << " M_L=" << p.M_L << " err=" << fmt(p.final_err) << " < 10x floor]";
          break;
        case Where::margin: break;
      }
    }
    ok = ok && bad == 0 && inside > 0 && outside > 0;
    os << " (" << s.tag << ": " << inside << " inside, " << outside << " outside)";
  }
  return {ok, os.str()};
}

Verdict criterion3() {
  auto cfg = macro_cfg(scenarios()[1], 0.25, 150.0, "uniform");
  cfg.output_stride = 10;
  auto sc = app::build_scenario(cfg);
  auto ref = app::leader_reference(cfg, sc, 0.25);
  auto mc = app::macro_config(cfg, sc, ref, 0.25);
  auto r = run(mc);
  note_drift(r);
  const auto& s = r.series;
  const double e0F = s.front().err_F, e0L = s.front().err_L;
  bool monotone = true;
  double worst_rise = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1].t < kTransientEnd) continue;
    if (s[i].err_F > s[i - 1].err_F) {
      monotone = false;
      worst_rise = std::max(worst_rise, s[i].err_F - s[i - 1].err_F);
    }
  }
  const double frac = s.back().err_F / e0F;
  double worst_leader = 0;
  for (const auto& d : s) {
    if (d.t > kLeaderDecayWindow + 1e-9) break;
    const double want = e0L * std::exp(-cfg.K * d.t);
    worst_leader = std::max(worst_leader, std::abs(d.err_L - want) / want);
  }
  const bool ok = monotone && frac <= kRegulationFinalFrac && worst_leader <= kLeaderDecayTol;
  return {ok, "final/initial err_F=" + fmt(frac) + ", monotone after t=" + fmt(kTransientEnd) + ": " +
                  (monotone ? "yes" : "no (rise " + fmt(worst_rise) + ")") +
                  ", max leader deviation from exp(-Kt)=" + fmt(100 * worst_leader) + "%"};
}

Verdict criterion4() {
  double worst = worst_drift_seen;
  int runs = 1;
  for (auto& [tag, pts] : macro_sweeps())
    for (const auto& p : pts) worst = std::max(worst, p.drift_per_1e4), ++runs;
  // and one long 2D run with the spectral control law
  auto cfg = parse_config(
      "mode = macro\ndomain.dim = 2\ndomain.n = 32\ntarget.family = bimodal_von_mises\nkernels.ff.kind = morse\n"
      "kernels.ff.ell_r = pi/2\nkernels.ff.ell_a = pi\nkernels.ff.zeta = 1\nphysics.D = 0.01\nmasses.M_F = 0.4\n"
      "masses.M_L = 0.6\ntime.T = 100\ntime.output_stride = 1000\nfeasibility.fallback = true\n");
  auto sc = app::build_scenario(cfg);
  auto ref = app::leader_reference(cfg, sc, 0.6);
  auto r = run(app::macro_config(cfg, sc, ref, 0.6));
  note_drift(r);
  worst = std::max(worst, worst_drift_seen);
  ++runs;
  return {worst <= kMassDriftPer1e4, "worst relative drift per 1e4 steps " + fmt(worst, 3) + " over " +
                                         std::to_string(runs) + " runs"};
}

Verdict criterion5() {
  bool ok = true;
  int runs = 0;
  double worst = 0;
  for (const auto& s : scenarios()) {
    auto r = thresholds(s);
    for (const auto& p : macro_sweeps()[s.tag]) {
      if (classify(p.M_L, r.M_hat_1, r.M_hat_2) != Where::inside) continue;
      ++runs;
      worst = std::max(worst, p.max_err / p.ref_norm);
      if (p.max_err > kSweepFloorRel * p.ref_norm) ok = false;
    }
  }
  return {ok && runs > 0, std::to_string(runs) + " feasible runs, worst sup_t err_F/||ref|| = " + fmt(worst, 3)};
}

Verdict criterion6() {
  double worst1 = 0;
  const double masses[] = {0.3, 0.4, 0.45};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = scenarios()[i];
    std::string text = s.text;
    text.replace(text.find("domain.n = 500"), 14, "domain.n = " + std::to_string(kRoundTripMesh1D));
    auto cfg = parse_config("mode = macro\nmasses.M_L = 0.5\nmasses.M_F = 0.5\n" + text);
    auto sc = app::build_scenario(cfg);
    auto rep = theorem1_report(sc.target, sc.ff_kernel, cfg.fl_ell, cfg.D);
    const double M = masses[i];
    auto tgt = scale_to_mass(sc.target, 1.0 - M);
    auto syn = synthesize_leader_density_1d(rep, tgt, M);
    auto v = circular_convolve(sc.fl_kernel, syn.rho_L);
    worst1 = std::max(worst1, (v - steady_interaction_field(tgt, sc.ff_kernel, cfg.D)).max_abs());
  }
  const PeriodicMesh m2(2, kRoundTripMesh2D);
  auto k2 = materialize(KernelSpec::repulsive(kPi, 2), m2);
  auto rho = GridFunction::sample(m2, [](const Vec2& x) {
    return 0.01 * (2.0 + std::cos(x[0] - 0.5) * std::sin(x[1]) + 0.5 * std::exp(std::sin(x[0] + 2 * x[1])));
  });
  auto d = deconvolve_2d(circular_convolve(k2, rho), k2, 0.5);
  GridFunction diff = d.R - rho;
  const double shift = -integral(diff) / (kTwoPi * kTwoPi);
  for (auto& v : diff.values()) v += shift;
  const double worst2 = diff.max_abs();
  return {worst1 <= kRoundTripTol && worst2 <= kRoundTripTol,
          "1D sup error " + fmt(worst1, 3) + " (n=" + std::to_string(kRoundTripMesh1D) + "), 2D sup error " + fmt(worst2, 3)};
}

Verdict criterion7() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  const double fractions[] = {0.25, 0.5, 0.9, 0.99, 0.999};
  int tuples = 0, drawn = 0, counter = 0, eig_bad = 0;
  while (tuples < kBasinTuples) {
    LemmaParams p{u(rng), u(rng), u(rng), u(rng), u(rng)};
    ++drawn;
    auto eq = equilibria(p);
    if (eq[0].eigenvalues[0] != -p.alpha || eq[0].eigenvalues[1] != -p.k) ++eig_bad;
    auto b = basin_estimate(p);
    if (!b.basin_bound || !(*b.basin_bound > 0)) continue;
    ++tuples;
    for (double f : fractions)
      if (integrate(p, f * *b.basin_bound).fate != Fate::converges) ++counter;
  }
  double worst_limit = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), dl = u(rng);
    auto b = basin_estimate({a, 0.0, 0.0, dl, u(rng)});
    const double want = a * a / (dl * dl);
    worst_limit = b.basin_bound ? std::max(worst_limit, std::abs(*b.basin_bound - want) / want) : 1.0;
  }
  return {counter == 0 && eig_bad == 0 && worst_limit <= kBasinLimitTol,
          std::to_string(tuples) + " bounded tuples of " + std::to_string(drawn) + " drawn, " + std::to_string(counter) +
              " counterexamples, " + std::to_string(eig_bad) + " eigenvalue mismatches, limit bound rel error " +
              fmt(worst_limit, 3)};
}

Verdict criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> half(2, 32);
  std::uniform_int_distribution<int> dimd(1, 2);
  std::normal_distribution<double> g;
  double worst = 0;
  for (int i = 0; i < kConvolutionInstances; ++i) {
    const int dim = dimd(rng);
    const int n = 2 * (dim == 1 ? half(rng) : std::min(half(rng), 12));
    const PeriodicMesh mesh(dim, n);
    const int comps = dim == 2 && i % 2 ? 2 : 1;
    GridFunction k(mesh, comps), rho(mesh);
    for (auto& v : k.values()) v = g(rng);
    for (auto& v : rho.values()) v = g(rng);
    auto a = circular_convolve(k, rho);
    auto b = circular_convolve_direct(k, rho);
    worst = std::max(worst, (a - b).max_abs() / std::max(b.max_abs(), 1e-300));
  }
  return {worst <= kConvolutionTol, std::to_string(kConvolutionInstances) + " instances, worst relative error " + fmt(worst, 3)};
}

Verdict criterion9() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& s : scenarios()) {
    auto r = thresholds(s);
    const auto& macro = macro_sweeps()[s.tag];
    std::vector<double> mean(macro.size(), 0.0);
    std::vector<double> runs(macro.size() * kMicroSeeds, 0.0);
    app::parallel_for(runs.size(), jobs(), [&](std::size_t job) {
      const std::size_t i = job / kMicroSeeds;
      const std::uint64_t seed = app::derive_seed(1000 + static_cast<unsigned char>(s.tag), job);
      const double M_L = macro[i].M_L;
      const std::int64_t N_L = std::lround(M_L * kMicroAgents);
      auto cfg = parse_config("mode = micro\n" + s.text + "counts.N_L = " + std::to_string(N_L) + "\ncounts.N_F = " +
                              std::to_string(kMicroAgents - N_L) + "\ntime.T = 100\ntime.output_stride = 1000\n"
                              "feasibility.fallback = true\n");
      auto sc = app::build_scenario(cfg);
      auto ref = app::leader_reference(cfg, sc, M_L);
      auto mc = app::micro_config(cfg, sc, ref, N_L, kMicroAgents - N_L, seed);
      runs[job] = run_micro(mc).series.back().err_F;
    });
    for (std::size_t i = 0; i < macro.size(); ++i)
      for (int k = 0; k < kMicroSeeds; ++k) mean[i] += runs[i * kMicroSeeds + k] / kMicroSeeds;
    const std::size_t best = static_cast<std::size_t>(std::min_element(mean.begin(), mean.end()) - mean.begin());
    const bool located = classify(macro[best].M_L, r.M_hat_1, r.M_hat_2) == Where::inside;
    bool above = true;
    for (std::size_t i = 0; i < macro.size(); ++i) above = above && mean[i] > macro[i].final_err;
    ok = ok && located && above;
    os << " (" << s.tag << ": min mean err_F " << fmt(mean[best]) << " at M_L=" << macro[best].M_L
       << (located ? " inside" : " OUTSIDE") << " [" << fmt(r.M_hat_1) << "," << fmt(std::min(r.M_hat_2, 1.0))
       << "]; micro > macro at " << (above ? "all" : "NOT all") << " points; curve";
    for (std::size_t i = 0; i < macro.size(); ++i) os << " " << macro[i].M_L << ":" << fmt(mean[i], 3);
    os << ")";
  }
  return {ok, os.str()};
}

Verdict criterion10() {
  // (i) 1D kernels lifted to (f(x1), 0) act on x2-constant densities as in 1D
  const int n = 64;
  auto cfg1 = macro_cfg(scenarios()[1], 0.3, 10.0, "uniform");
  cfg1.n = n;
  cfg1.law = ControlLaw::poisson;
  cfg1.substeps = 1;
  cfg1.output_stride = 10;
  auto sc = app::build_scenario(cfg1);
  auto ref = app::leader_reference(cfg1, sc, 0.3);
  auto m1 = app::macro_config(cfg1, sc, ref, 0.3);
  m1.rho_L0 = GridFunction::sample(m1.rho_L0.mesh(), [](const Vec2& x) { return 0.3 / kTwoPi * (1 + 0.5 * std::sin(x[0])); });
  auto one = run(m1);
  note_drift(one);
  const PeriodicMesh m2(2, n);
  auto lift = [&](const GridFunction& f) {
    GridFunction out(m2);
    for (std::size_t i = 0; i < m2.num_nodes(); ++i) out[i] = f[i / n] / kTwoPi;
    return out;
  };
  auto lift_kernel = [&](const GridFunction& f) {
    GridFunction out(m2, 2);
    for (std::size_t i = 0; i < m2.num_nodes(); ++i) out.at(0, i) = f[i / n];
    return out;
  };
  MacroRunConfig c2 = m1;
  c2.fl_kernel = lift_kernel(m1.fl_kernel);
  c2.ff_kernel = lift_kernel(m1.ff_kernel);
  c2.rho_F_ref = lift(m1.rho_F_ref);
  c2.rho_L_ref = lift(m1.rho_L_ref);
  c2.rho_F0 = lift(m1.rho_F0);
  c2.rho_L0 = lift(m1.rho_L0);
  auto two = run(c2);
  note_drift(two);
  double worst = 0;
  for (std::size_t i = 0; i < one.series.size() && i < two.series.size(); ++i)
    worst = std::max(worst, std::abs(two.series[i].err_F * std::sqrt(kTwoPi) - one.series[i].err_F));
  const bool consistent = one.series.size() == two.series.size() && worst <= kConsistencyTol;

  // (ii) the 2D agent trial
  auto cfg = parse_config(
      "mode = micro\ndomain.dim = 2\ndomain.n = 50\ntarget.family = bimodal_von_mises\ntarget.kappa1 = 1\n"
      "target.kappa2 = 1\nkernels.ff.kind = morse\nkernels.ff.ell_r = pi/2\nkernels.ff.ell_a = pi\nkernels.ff.zeta = 1\n"
      "physics.D = 0.01\ncounts.N_F = 660\ncounts.N_L = 340\ntime.T = 200\ntime.output_stride = 100\n"
      "feasibility.fallback = true\n");
  auto sc2 = app::build_scenario(cfg);
  auto ref2 = app::leader_reference(cfg, sc2, 0.34);
  auto res = run_micro(app::micro_config(cfg, sc2, ref2, 340, 660, 7));
  const auto& s = res.series;
  const double e0 = s.front().err_F, k0 = s.front().kl_F;
  const double eT = s.back().err_F, kT = s.back().kl_F;
  const std::size_t q = s.size() - s.size() / 4;
  double lo = std::numeric_limits<double>::infinity(), hi = 0, mean = 0;
  for (std::size_t i = q; i < s.size(); ++i) lo = std::min(lo, s[i].err_F), hi = std::max(hi, s[i].err_F), mean += s[i].err_F;
  mean /= static_cast<double>(s.size() - q);
  const bool decreasing = eT <= kTrialDecreaseFrac * e0 && kT <= kTrialDecreaseFrac * k0;
  const bool plateau = mean > 0 && (hi - lo) <= kTrialPlateauSpread * mean;
  return {consistent && decreasing && plateau,
          "1D/2D max series gap " + fmt(worst, 3) + "; trial err_F " + fmt(e0) + " -> " + fmt(eT) + ", KL_F " + fmt(k0) +
              " -> " + fmt(kT) + ", last-quarter spread " + fmt((hi - lo) / mean) + " of mean " + fmt(mean) +
              (ref2.fallback_applied ? " (rescaled leader reference, M_hat=" + fmt(ref2.M_hat_1) + ")" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (int i = 0; i < static_cast<int>(criteria.size()); ++i) {
    if (!wanted.empty() && !wanted.count(i + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << v.detail << " [" << fmt(secs, 3) << " s]"
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
