#include "modes.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "densctl/error.hpp"
#include "densctl/lemma_ode.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;

namespace densctl::app {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Output directory that only becomes visible under its final name once
/// every artifact is written.
class RunDirectory {
 public:
  RunDirectory(const fs::path& root, const std::string& mode, const ScenarioConfig& cfg) : root_(root) {
    fs::create_directories(root_);
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    name_ = mode + "-" + stamp;
    tmp_ = root_ / ("." + name_ + ".partial-" + std::to_string(::getpid()));
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
    header_.push_back("densctl " + mode);
    std::istringstream lines(serialize(cfg));
    for (std::string line; std::getline(lines, line);) header_.push_back(line);
  }
  ~RunDirectory() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(tmp_, ec);
    }
  }
  RunDirectory(const RunDirectory&) = delete;
  RunDirectory& operator=(const RunDirectory&) = delete;

  const std::vector<std::string>& header() const { return header_; }
  fs::path path(const std::string& file) const { return tmp_ / file; }

  /// Opens a CSV with the resolved config as a commented header.
  std::ofstream csv(const std::string& file, const std::vector<std::string>& extra = {}) const {
    std::ofstream os(path(file));
    if (!os) throw Error("cannot write " + path(file).string());
    for (const auto& h : header_) os << "# " << h << '\n';
    for (const auto& h : extra) os << "# " << h << '\n';
    return os;
  }

  void write_grid(const std::string& file, const GridFunction& f, const std::vector<std::string>& extra = {}) const {
    std::vector<std::string> lines = header_;
    lines.insert(lines.end(), extra.begin(), extra.end());
    write_csv(path(file).string(), f, lines);
  }

  std::string commit() {
    fs::path final_path = root_ / name_;
    for (int k = 2; fs::exists(final_path); ++k) final_path = root_ / (name_ + "-" + std::to_string(k));
    fs::rename(tmp_, final_path);
    committed_ = true;
    return final_path.string();
  }

 private:
  fs::path root_;
  fs::path tmp_;
  std::string name_;
  std::vector<std::string> header_;
  bool committed_ = false;
};

const char* series_columns = "t,err_L,err_F,kl_L,kl_F,mass_L,mass_F";

void write_series(std::ostream& os, const std::vector<DiagnosticSample>& series) {
  os << series_columns << '\n';
  for (const auto& d : series)
    os << num(d.t) << ',' << num(d.err_L) << ',' << num(d.err_F) << ',' << num(d.kl_L) << ',' << num(d.kl_F) << ','
       << num(d.mass_L) << ',' << num(d.mass_F) << '\n';
}

double percent(const ScenarioConfig& cfg, double err, double initial, double ref_norm) {
  return percentage_error(err, cfg.percent_normalizer == "reference" ? ref_norm : initial);
}

std::string bound_str(double v) { return std::isinf(v) ? (v > 0 ? "+inf" : "-inf") : short_num(v); }

void report_thresholds(std::ostream& os, const LeaderReference& ref, double M_L, int dim) {
  if (dim == 1) {
    os << "M_hat_1 = " << bound_str(ref.M_hat_1) << "\n";
    os << "M_hat_2 = " << bound_str(ref.M_hat_2) << "\n";
    os << "zero_set_ok = " << (ref.report && ref.report->zero_set_ok ? "true" : "false") << "\n";
  } else {
    os << "deconvolution mass M_hat = " << short_num(ref.M_hat_1) << "\n";
  }
  os << "M_L = " << short_num(M_L) << " feasible = " << (ref.feasible ? "true" : "false")
     << (ref.fallback_applied ? " (fallback synthesis: shifted to min 0 and rescaled)" : "") << "\n";
}

void report_stability(std::ostream& os, const StabilityReport& s) {
  os << "stability: |g1|_inf = " << short_num(s.g1_inf) << ", F = " << short_num(s.F)
     << ", D(2 - |g1|_inf) > F: " << (s.condition_holds ? "holds" : "violated") << "\n";
  os << "lemma constants: alpha = " << short_num(s.alpha) << ", beta = " << short_num(s.beta)
     << ", gamma = " << short_num(s.gamma) << ", delta = " << short_num(s.delta)
     << " (alternative " << short_num(s.delta_alt) << "), k = " << short_num(s.k) << "\n";
  os << "basin bound on ||e_F||_2^2: " << (s.basin_eta_star ? short_num(*s.basin_eta_star) : "none") << "\n";
}

struct ModeResult {
  std::vector<std::string> report;
};

// ---------------------------------------------------------------- feasibility-map

void run_feasibility_map(const ScenarioConfig& cfg, const RunOptions& opts, RunDirectory& dir, std::ostream& report) {
  if (cfg.family != TargetFamily::von_mises)
    throw ConfigError("feasibility-map sweeps the von Mises concentration; set target.family = von_mises");
  const auto kappas = cfg.kappa_range.points();
  const auto Ds = cfg.D_range.points();
  const PeriodicMesh mesh(1, cfg.n);
  KernelSpec ff = cfg.ff;
  ff.dim = 1;
  const GridFunction ffk = materialize(ff, mesh);
  const FeasibilityOptions fopts{cfg.eps_H_rel, cfg.eps_G_rel};

  struct Row {
    double M1, M2;
    bool zs;
  };
  std::vector<Row> rows(kappas.size() * Ds.size());
  parallel_for(rows.size(), opts.jobs, [&](std::size_t i) {
    const double kappa = kappas[i / Ds.size()];
    const double D = Ds[i % Ds.size()];
    auto r = theorem1_report(von_mises_1d(kappa, cfg.mu, mesh), ffk, cfg.fl_ell, D, fopts);
    rows[i] = {r.M_hat_1, r.M_hat_2, r.zero_set_ok};
  });

  auto os = dir.csv("feasibility_map.csv");
  os << "kappa,D,M_hat_1,M_hat_2,zero_set_ok\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    os << num(kappas[i / Ds.size()]) << ',' << num(Ds[i % Ds.size()]) << ',' << num(rows[i].M1) << ','
       << num(rows[i].M2) << ',' << (rows[i].zs ? 1 : 0) << '\n';

  // Frontier: for each D, the smallest kappa at which no leader mass in
  // (0, 1) is feasible any more.
  report << "points = " << rows.size() << " (" << kappas.size() << " kappa x " << Ds.size() << " D)\n";
  report << "feasibility frontier (smallest kappa with no feasible leader mass, per D):\n";
  for (std::size_t j = 0; j < Ds.size(); ++j) {
    std::string where = "none in range";
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      const Row& r = rows[i * Ds.size() + j];
      const bool lost = !r.zs || r.M1 >= 1.0 || r.M2 <= 0.0 || r.M1 >= r.M2;
      if (lost) {
        where = short_num(kappas[i]);
        break;
      }
    }
    report << "  D = " << short_num(Ds[j]) << ": " << where << "\n";
  }
}

// ---------------------------------------------------------------- macro

void run_macro(const ScenarioConfig& cfg, RunDirectory& dir, std::ostream& report) {
  const Scenario sc = build_scenario(cfg);
  const double M_L = cfg.leader_mass();
  const LeaderReference ref = leader_reference(cfg, sc, M_L);
  const MacroRunConfig mc = macro_config(cfg, sc, ref, M_L);
  report_thresholds(report, ref, M_L, cfg.dim);
  if (cfg.N_F) {
    if (ref.M_hat_1 < 1.0) {
      auto b = leader_count_bounds(std::max(ref.M_hat_1, 0.0), ref.M_hat_2, *cfg.N_F);
      report << "leader count bounds for N_F = " << *cfg.N_F << ": N_L >= " << b.N_hat_1;
      if (b.N_hat_2) report << ", N_L <= " << *b.N_hat_2;
      report << "\n";
    }
  }
  report_stability(report, stability_report(scale_to_mass(sc.target, 1.0 - M_L), sc.ff, sc.fl, cfg.D, mc.rho_L0, cfg.K));

  const MacroRunResult res = run(mc);
  for (const auto& note : res.notes) report << "note: " << note << "\n";
  report << "diffusion substeps per dt = " << res.substeps << "\n";

  auto os = dir.csv("series.csv");
  write_series(os, res.series);
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    const SimState& s = res.snapshots[i];
    const std::vector<std::string> extra{"t = " + num(s.t)};
    dir.write_grid("snapshot_" + std::to_string(i) + "_rho_L.csv", s.rho_L, extra);
    dir.write_grid("snapshot_" + std::to_string(i) + "_rho_F.csv", s.rho_F, extra);
  }
  dir.write_grid("rho_L_ref.csv", ref.rho_L);
  dir.write_grid("rho_F_ref.csv", ref.rho_F);

  const DiagnosticSample& first = res.series.front();
  const DiagnosticSample& last = res.series.back();
  report << "final t = " << short_num(last.t) << ": err_L = " << short_num(last.err_L)
         << " (" << short_num(percent(cfg, last.err_L, first.err_L, l2_norm(ref.rho_L))) << "%), err_F = "
         << short_num(last.err_F) << " (" << short_num(percent(cfg, last.err_F, first.err_F, l2_norm(ref.rho_F)))
         << "%), percentages relative to the " << cfg.percent_normalizer << " error\n";
  report << "mass drift: leaders " << short_num(std::abs(last.mass_L - first.mass_L) / first.mass_L)
         << ", followers " << short_num(std::abs(last.mass_F - first.mass_F) / first.mass_F) << " (relative)\n";
}

// ---------------------------------------------------------------- micro

std::vector<std::uint64_t> effective_seeds(const ScenarioConfig& cfg, const RunOptions& opts) {
  std::vector<std::uint64_t> seeds = cfg.seeds;
  if (opts.seed)
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = *opts.seed + i;
  return seeds;
}

void write_agents(std::ostream& os, const AgentState& s) {
  os << (s.dim == 1 ? "species,agent_id,x" : "species,agent_id,x,y") << '\n';
  auto emit = [&](const char* species, const std::vector<Vec2>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      os << species << ',' << i << ',' << num(pts[i][0]);
      if (s.dim == 2) os << ',' << num(pts[i][1]);
      os << '\n';
    }
  };
  emit("leader", s.leaders);
  emit("follower", s.followers);
}

void run_micro_mode(const ScenarioConfig& cfg, const RunOptions& opts, RunDirectory& dir, std::ostream& report) {
  const Scenario sc = build_scenario(cfg);
  const std::int64_t N_L = *cfg.N_L, N_F = *cfg.N_F;
  const double M_L = static_cast<double>(N_L) / static_cast<double>(N_L + N_F);
  const LeaderReference ref = leader_reference(cfg, sc, M_L);
  report_thresholds(report, ref, M_L, cfg.dim);
  if (ref.M_hat_1 < 1.0) {
    auto b = leader_count_bounds(std::max(ref.M_hat_1, 0.0), ref.M_hat_2, N_F);
    report << "leader count bounds for N_F = " << N_F << ": N_L >= " << b.N_hat_1;
    if (b.N_hat_2) report << ", N_L <= " << *b.N_hat_2;
    report << " (configured N_L = " << N_L << ")\n";
  }

  const auto seeds = effective_seeds(cfg, opts);
  std::vector<MicroRunResult> results(seeds.size());
  parallel_for(seeds.size(), opts.jobs, [&](std::size_t i) {
    results[i] = run_micro(micro_config(cfg, sc, ref, N_L, N_F, seeds[i]));
  });

  double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  report << "seed manifest:\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string tag = "seed" + std::to_string(seeds[i]);
    auto os = dir.csv("series_" + tag + ".csv");
    write_series(os, results[i].series);
    for (std::size_t k = 0; k < results[i].snapshots.size(); ++k) {
      const AgentState& s = results[i].snapshots[k];
      auto ts = dir.csv("trajectory_" + tag + "_" + std::to_string(k) + ".csv", {"t = " + num(s.t)});
      write_agents(ts, s);
    }
    auto fs_ = dir.csv("trajectory_" + tag + "_final.csv", {"t = " + num(results[i].final_state.t)});
    write_agents(fs_, results[i].final_state);
    const double e = results[i].series.back().err_F;
    sum += e;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    report << "  " << seeds[i] << ": final err_F = " << short_num(e) << ", kl_F = "
           << short_num(results[i].series.back().kl_F) << "\n";
  }
  report << "final err_F over seeds: mean " << short_num(sum / seeds.size()) << ", min " << short_num(lo) << ", max "
         << short_num(hi) << "\n";
}

// ---------------------------------------------------------------- basin

struct BasinRow {
  LemmaParams p;
  BasinEstimate est;
  std::string label;
};

const char* fate_str(Fate f) {
  switch (f) {
    case Fate::converges: return "converges";
    case Fate::diverges: return "diverges";
    case Fate::undetermined: return "undetermined";
  }
  return "undetermined";
}

void run_basin(const ScenarioConfig& cfg, const RunOptions& opts, RunDirectory& dir, std::ostream& report) {
  std::vector<BasinRow> rows;
  if (cfg.basin_alpha) {
    rows.push_back({{*cfg.basin_alpha, *cfg.basin_beta, *cfg.basin_gamma, *cfg.basin_delta, *cfg.basin_k}, {}, "config"});
  } else if (cfg.M_F || cfg.N_F) {
    const Scenario sc = build_scenario(cfg);
    const double M_L = cfg.leader_mass();
    const LeaderReference ref = leader_reference(cfg, sc, M_L);
    const GridFunction rho_L0 = initial_density(cfg.initial_leaders, ref.rho_L, M_L);
    const StabilityReport s = stability_report(scale_to_mass(sc.target, 1.0 - M_L), sc.ff, sc.fl, cfg.D, rho_L0, cfg.K);
    report_stability(report, s);
    if (s.alpha > 0) {
      rows.push_back({{s.alpha, s.beta, s.gamma, s.delta, s.k}, {}, "scenario"});
      rows.push_back({{s.alpha, s.beta, s.gamma, s.delta_alt, s.k}, {}, "scenario-delta-alt"});
    } else {
      report << "alpha = 0: the lemma does not apply to this scenario\n";
    }
  }
  const std::uint64_t master = opts.seed ? *opts.seed : cfg.seeds.front();
  for (int i = 0; i < cfg.basin_samples; ++i) {
    std::mt19937_64 rng(derive_seed(master, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> u(cfg.basin_lo, cfg.basin_hi);
    LemmaParams p;
    p.alpha = u(rng);
    p.beta = u(rng);
    p.gamma = u(rng);
    p.delta = u(rng);
    p.k = u(rng);
    rows.push_back({p, {}, "sample-" + std::to_string(i)});
  }
  for (auto& r : rows) r.est = basin_estimate(r.p);

  const auto& fr = cfg.basin_eta_fractions;
  struct Traj {
    double eta0;
    bool of_bound;
    LemmaTrajectory tr;
  };
  std::vector<Traj> trajs(rows.size() * fr.size());
  LemmaOptions lopts;
  lopts.dt = cfg.lemma_dt;
  lopts.blowup = cfg.lemma_blowup;
  parallel_for(trajs.size(), opts.jobs, [&](std::size_t i) {
    const BasinRow& r = rows[i / fr.size()];
    const double frac = fr[i % fr.size()];
    const bool of_bound = r.est.basin_bound.has_value();
    const double ref = of_bound ? *r.est.basin_bound : std::pow(r.p.alpha / r.p.delta, 2);
    trajs[i] = {frac * ref, of_bound, integrate(r.p, frac * ref, lopts)};
  });

  auto os = dir.csv("basin.csv");
  os << "alpha,beta,gamma,delta,k,eta_1,eta_2,bound_present,label\n";
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("nan"); };
  for (const auto& r : rows)
    os << num(r.p.alpha) << ',' << num(r.p.beta) << ',' << num(r.p.gamma) << ',' << num(r.p.delta) << ','
       << num(r.p.k) << ',' << opt(r.est.eta_1) << ',' << opt(r.est.eta_2) << ','
       << (r.est.basin_bound ? 1 : 0) << ',' << r.label << '\n';

  auto ts = dir.csv("basin_trajectories.csv");
  ts << "label,reference,fraction,eta0,fate,final_t,final_eta\n";
  int below = 0, counterexamples = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const Traj& t = trajs[i];
    const double frac = fr[i % fr.size()];
    ts << rows[i / fr.size()].label << ',' << (t.of_bound ? "bound" : "saddle") << ',' << num(frac) << ','
       << num(t.eta0) << ',' << fate_str(t.tr.fate) << ',' << num(t.tr.final_t) << ',' << num(t.tr.final_eta) << '\n';
    if (t.of_bound && frac < 1.0) {
      ++below;
      if (t.tr.fate != Fate::converges) ++counterexamples;
    }
  }
  const auto with_bound = std::count_if(rows.begin(), rows.end(), [](const BasinRow& r) { return r.est.basin_bound; });
  report << "parameter tuples = " << rows.size() << ", with a basin bound = " << with_bound << "\n";
  report << "trajectories started below the bound = " << below << ", not converging = " << counterexamples << "\n";
  report << "sampling seed = " << master << "\n";
}

// ---------------------------------------------------------------- sweep-ml

struct SweepPoint {
  double M_L = 0.0;
  std::int64_t N_L = 0;
  bool refined = false;
  bool feasible = false;
  std::vector<double> err, kl;
  double ref_norm = 0.0;
};

void evaluate_sweep(const ScenarioConfig& cfg, const Scenario& sc, const std::vector<std::uint64_t>& seeds,
                    std::vector<SweepPoint>& pts, std::size_t begin, int jobs) {
  const bool micro = cfg.sweep_model == SweepModel::micro;
  const std::size_t reps = micro ? seeds.size() : 1;
  const std::size_t count = pts.size() - begin;
  for (std::size_t i = begin; i < pts.size(); ++i) {
    pts[i].err.assign(reps, 0.0);
    pts[i].kl.assign(reps, 0.0);
  }
  std::vector<LeaderReference> refs(count);
  parallel_for(count, jobs, [&](std::size_t i) { refs[i] = leader_reference(cfg, sc, pts[begin + i].M_L); });
  for (std::size_t i = 0; i < count; ++i) {
    pts[begin + i].feasible = refs[i].feasible;
    pts[begin + i].ref_norm = l2_norm(refs[i].rho_F);
  }
  parallel_for(count * reps, jobs, [&](std::size_t task) {
    const std::size_t i = task / reps, r = task % reps;
    SweepPoint& pt = pts[begin + i];
    DiagnosticSample last;
    if (micro) {
      const std::int64_t N = cfg.total_agents;
      last = run_micro(micro_config(cfg, sc, refs[i], pt.N_L, N - pt.N_L, derive_seed(seeds[r], begin + i)))
                 .series.back();
    } else {
      last = run(macro_config(cfg, sc, refs[i], pt.M_L)).series.back();
    }
    pt.err[r] = last.err_F;
    pt.kl[r] = last.kl_F;
  });
}

void run_sweep_ml(const ScenarioConfig& cfg, const RunOptions& opts, RunDirectory& dir, std::ostream& report) {
  const Scenario sc = build_scenario(cfg);
  const FeasibilityReport thr =
      theorem1_report(sc.target, sc.ff_kernel, cfg.fl_ell, cfg.D, {cfg.eps_H_rel, cfg.eps_G_rel});
  const bool micro = cfg.sweep_model == SweepModel::micro;
  const std::int64_t N = cfg.total_agents;
  auto make_point = [&](double M_L, bool refined) {
    SweepPoint p;
    p.refined = refined;
    if (micro) {
      p.N_L = std::clamp<std::int64_t>(std::llround(M_L * N), 1, N - 1);
      p.M_L = static_cast<double>(p.N_L) / static_cast<double>(N);
    } else {
      p.M_L = M_L;
    }
    return p;
  };

  std::vector<SweepPoint> pts;
  for (double m : cfg.ML_range.points()) pts.push_back(make_point(m, false));
  const auto seeds = effective_seeds(cfg, opts);
  evaluate_sweep(cfg, sc, seeds, pts, 0, opts.jobs);

  // One refinement pass around each threshold inside the coarse range.
  const std::size_t coarse = pts.size();
  const double step = cfg.ML_range.count > 1 ? (cfg.ML_range.hi - cfg.ML_range.lo) / (cfg.ML_range.count - 1) : 0.0;
  for (double knee : {thr.M_hat_1, thr.M_hat_2}) {
    if (!(knee > cfg.ML_range.lo && knee < cfg.ML_range.hi) || step == 0.0) continue;
    for (int j = 0; j < cfg.refine_points; ++j) {
      const double m = knee - step + 2.0 * step * (j + 1) / (cfg.refine_points + 1);
      if (m <= 0.0 || m >= 1.0) continue;
      SweepPoint p = make_point(m, true);
      const bool dup = std::any_of(pts.begin(), pts.end(), [&](const SweepPoint& q) {
        return std::abs(q.M_L - p.M_L) < 1e-12;
      });
      if (!dup) pts.push_back(p);
    }
  }
  evaluate_sweep(cfg, sc, seeds, pts, coarse, opts.jobs);

  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].M_L < pts[b].M_L; });

  auto os = dir.csv("sweep_ml.csv");
  os << "M_L,N_L,feasible,refined,err_F_mean,err_F_min,err_F_max,kl_F_mean,err_F_rel_mean\n";
  for (std::size_t idx : order) {
    const SweepPoint& p = pts[idx];
    double sum = 0.0, kl = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t r = 0; r < p.err.size(); ++r) {
      sum += p.err[r];
      kl += p.kl[r];
      lo = std::min(lo, p.err[r]);
      hi = std::max(hi, p.err[r]);
    }
    const double mean = sum / p.err.size();
    os << num(p.M_L) << ',' << p.N_L << ',' << (p.feasible ? 1 : 0) << ',' << (p.refined ? 1 : 0) << ','
       << num(mean) << ',' << num(lo) << ',' << num(hi) << ',' << num(kl / p.err.size()) << ','
       << num(mean / p.ref_norm) << '\n';
  }
  report << "M_hat_1 = " << bound_str(thr.M_hat_1) << "\nM_hat_2 = " << bound_str(thr.M_hat_2) << "\n";
  report << "zero_set_ok = " << (thr.zero_set_ok ? "true" : "false") << "\n";
  report << "model = " << (micro ? "micro" : "macro") << ", points = " << pts.size() << " (" << coarse
         << " coarse, " << pts.size() - coarse << " refined)\n";
  if (micro) {
    report << "total agents = " << N << "; per-point seeds derived from the master seeds:";
    for (auto s : seeds) report << ' ' << s;
    report << "\n";
  }
}

}  // namespace

int resolve_jobs(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError("--jobs must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("DENSCTL_JOBS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("DENSCTL_JOBS must be a positive integer");
    return static_cast<int>(v);
  }
  return 1;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i; !failed && (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

RunOutcome run_mode(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log) {
  RunOutcome out;
  try {
    const fs::path root = opts.out_dir ? *opts.out_dir : cfg.output_dir;
    const std::string mode = to_string(cfg.mode);
    RunDirectory dir(root, mode, cfg);
    std::ostringstream body;
    const auto start = std::chrono::steady_clock::now();
    switch (cfg.mode) {
      case Mode::feasibility_map: run_feasibility_map(cfg, opts, dir, body); break;
      case Mode::macro: run_macro(cfg, dir, body); break;
      case Mode::micro: run_micro_mode(cfg, opts, dir, body); break;
      case Mode::basin: run_basin(cfg, opts, dir, body); break;
      case Mode::sweep_ml: run_sweep_ml(cfg, opts, dir, body); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    {
      std::ofstream rep(dir.path("report.txt"));
      rep << "densctl " << mode << " run report\n\n" << body.str() << "\n";
      rep << "wall-clock = " << short_num(wall) << " s, jobs = " << opts.jobs << "\n";
      if (cfg.mode == Mode::micro || cfg.mode == Mode::sweep_ml) {
        rep << "seeds:";
        for (auto s : effective_seeds(cfg, opts)) rep << ' ' << s;
        rep << "\n";
      }
      rep << "\nresolved configuration (defaults included):\n";
      for (std::size_t i = 1; i < dir.header().size(); ++i) rep << "  " << dir.header()[i] << "\n";
      if (!rep) throw Error("cannot write report.txt");
    }
    out.directory = dir.commit();
    log << "densctl: wrote " << out.directory << "\n";
  } catch (const NumericalAbort& e) {
    out.code = ExitCode::numerical_abort;
    out.message = e.what();
    log << "densctl: numerical abort: " << e.what() << "\n";
  } catch (const std::exception& e) {
    out.code = ExitCode::config_error;
    out.message = e.what();
    log << "densctl: error: " << e.what() << "\n";
  }
  return out;
}

}  // namespace densctl::app
