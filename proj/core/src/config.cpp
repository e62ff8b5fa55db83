#include "densctl/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "densctl/error.hpp"

namespace densctl {
namespace {

// Recursive-descent evaluator for the numeric value grammar.
class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  double parse() {
    double v = expr();
    skip();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  double expr() {
    double v = term();
    for (;;) {
      skip();
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = power();
    for (;;) {
      skip();
      if (eat('*')) v *= power();
      else if (eat('/')) v /= power();
      else return v;
    }
  }
  double power() {
    double base = unary();
    skip();
    if (eat('^')) return std::pow(base, power());
    return base;
  }
  double unary() {
    skip();
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }
  double primary() {
    skip();
    if (eat('(')) {
      double v = expr();
      skip();
      if (!eat(')')) fail();
      return v;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return kPi;
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail();
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail() const { throw ConfigError("cannot parse numeric value '" + s_ + "'"); }

  std::string s_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int to_int(const std::string& v) {
  double d = evaluate_expression(v);
  if (d != std::floor(d) || std::abs(d) > 2e9) throw ConfigError("expected an integer, got '" + v + "'");
  return static_cast<int>(d);
}

std::int64_t to_int64(const std::string& v) {
  double d = evaluate_expression(v);
  if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError("expected an integer, got '" + v + "'");
  return static_cast<std::int64_t>(d);
}

std::uint64_t to_uint64(const std::string& v) {
  try {
    std::size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size() || v.find('-') != std::string::npos) throw ConfigError("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("expected a nonnegative integer seed, got '" + v + "'");
  }
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) out.push_back(evaluate_expression(item));
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

Range to_range(const std::string& v) {
  auto parts = split(v, ':');
  if (parts.size() != 3) throw ConfigError("expected a range lo:hi:count, got '" + v + "'");
  Range r{evaluate_expression(parts[0]), evaluate_expression(parts[1]), to_int(parts[2])};
  if (r.count < 1) throw ConfigError("range count must be >= 1 in '" + v + "'");
  if (r.hi < r.lo) throw ConfigError("range upper bound below lower bound in '" + v + "'");
  return r;
}

std::string range_str(const Range& r) { return num(r.lo) + ":" + num(r.hi) + ":" + std::to_string(r.count); }

const char* kind_str(KernelKind k) {
  switch (k) {
    case KernelKind::none: return "none";
    case KernelKind::repulsive: return "repulsive";
    case KernelKind::morse: return "morse";
  }
  return "none";
}

KernelKind kind_from(const std::string& v) {
  if (v == "none") return KernelKind::none;
  if (v == "repulsive") return KernelKind::repulsive;
  if (v == "morse") return KernelKind::morse;
  throw ConfigError("unknown kernel kind '" + v + "' (none, repulsive, morse)");
}

const char* family_str(TargetFamily f) {
  switch (f) {
    case TargetFamily::von_mises: return "von_mises";
    case TargetFamily::bimodal_von_mises: return "bimodal_von_mises";
    case TargetFamily::tabulated: return "tabulated";
  }
  return "von_mises";
}

TargetFamily family_from(const std::string& v) {
  if (v == "von_mises") return TargetFamily::von_mises;
  if (v == "bimodal_von_mises") return TargetFamily::bimodal_von_mises;
  if (v == "tabulated") return TargetFamily::tabulated;
  throw ConfigError("unknown target family '" + v + "' (von_mises, bimodal_von_mises, tabulated)");
}

struct KeyDef {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  // empty optional: omit from serialization
  std::function<std::optional<std::string>(const ScenarioConfig&)> get;
};

template <typename T>
std::optional<std::string> opt_num(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  if constexpr (std::is_integral_v<T>) return std::to_string(*v);
  else return num(*v);
}

const std::map<std::string, KeyDef>& key_table() {
  using C = ScenarioConfig;
  using S = std::string;
  static const std::map<std::string, KeyDef> table = {
      {"mode", {[](C& c, const S& v) { c.mode = mode_from_string(v); }, [](const C& c) { return to_string(c.mode); }}},
      {"domain.dim", {[](C& c, const S& v) { c.dim = to_int(v); }, [](const C& c) { return std::to_string(c.dim); }}},
      {"domain.n", {[](C& c, const S& v) { c.n = to_int(v); }, [](const C& c) { return std::to_string(c.n); }}},
      {"target.family", {[](C& c, const S& v) { c.family = family_from(v); }, [](const C& c) { return S(family_str(c.family)); }}},
      {"target.kappa", {[](C& c, const S& v) { c.kappa = evaluate_expression(v); }, [](const C& c) { return num(c.kappa); }}},
      {"target.mu", {[](C& c, const S& v) { c.mu = evaluate_expression(v); }, [](const C& c) { return num(c.mu); }}},
      {"target.kappa1", {[](C& c, const S& v) { c.kappa1 = evaluate_expression(v); }, [](const C& c) { return num(c.kappa1); }}},
      {"target.kappa2", {[](C& c, const S& v) { c.kappa2 = evaluate_expression(v); }, [](const C& c) { return num(c.kappa2); }}},
      {"target.nu", {[](C& c, const S& v) { c.nu = evaluate_expression(v); }, [](const C& c) { return num(c.nu); }}},
      {"target.file", {[](C& c, const S& v) { c.target_file = v; }, [](const C& c) { return c.target_file; }}},
      {"kernels.fl.ell", {[](C& c, const S& v) { c.fl_ell = evaluate_expression(v); }, [](const C& c) { return num(c.fl_ell); }}},
      {"kernels.ff.kind", {[](C& c, const S& v) { c.ff.kind = kind_from(v); }, [](const C& c) { return S(kind_str(c.ff.kind)); }}},
      {"kernels.ff.ell", {[](C& c, const S& v) { c.ff.ell = evaluate_expression(v); }, [](const C& c) { return num(c.ff.ell); }}},
      {"kernels.ff.ell_r", {[](C& c, const S& v) { c.ff.ell_r = evaluate_expression(v); }, [](const C& c) { return num(c.ff.ell_r); }}},
      {"kernels.ff.ell_a", {[](C& c, const S& v) { c.ff.ell_a = evaluate_expression(v); }, [](const C& c) { return num(c.ff.ell_a); }}},
      {"kernels.ff.zeta", {[](C& c, const S& v) { c.ff.zeta = evaluate_expression(v); }, [](const C& c) { return num(c.ff.zeta); }}},
      {"kernels.images", {[](C& c, const S& v) { c.images = to_int(v); }, [](const C& c) { return std::to_string(c.images); }}},
      {"kernels.table_points", {[](C& c, const S& v) { c.table_points = to_int(v); }, [](const C& c) { return std::to_string(c.table_points); }}},
      {"physics.D", {[](C& c, const S& v) { c.D = evaluate_expression(v); }, [](const C& c) { return num(c.D); }}},
      {"control.K", {[](C& c, const S& v) { c.K = evaluate_expression(v); }, [](const C& c) { return num(c.K); }}},
      {"control.law",
       {[](C& c, const S& v) {
          if (v == "antiderivative") c.law = ControlLaw::antiderivative;
          else if (v == "poisson") c.law = ControlLaw::poisson;
          else throw ConfigError("unknown control law '" + v + "' (antiderivative, poisson)");
        },
        [](const C& c) { return S(c.law == ControlLaw::antiderivative ? "antiderivative" : "poisson"); }}},
      {"control.density_floor", {[](C& c, const S& v) { c.density_floor = evaluate_expression(v); }, [](const C& c) { return num(c.density_floor); }}},
      {"masses.M_F", {[](C& c, const S& v) { c.M_F = evaluate_expression(v); }, [](const C& c) { return opt_num(c.M_F); }}},
      {"masses.M_L", {[](C& c, const S& v) { c.M_L = evaluate_expression(v); }, [](const C& c) { return opt_num(c.M_L); }}},
      {"counts.N_F", {[](C& c, const S& v) { c.N_F = to_int64(v); }, [](const C& c) { return opt_num(c.N_F); }}},
      {"counts.N_L", {[](C& c, const S& v) { c.N_L = to_int64(v); }, [](const C& c) { return opt_num(c.N_L); }}},
      {"time.dt", {[](C& c, const S& v) { c.dt = evaluate_expression(v); }, [](const C& c) { return num(c.dt); }}},
      {"time.T", {[](C& c, const S& v) { c.T = evaluate_expression(v); }, [](const C& c) { return num(c.T); }}},
      {"time.output_stride", {[](C& c, const S& v) { c.output_stride = to_int(v); }, [](const C& c) { return std::to_string(c.output_stride); }}},
      {"time.substeps", {[](C& c, const S& v) { c.substeps = to_int(v); }, [](const C& c) { return std::to_string(c.substeps); }}},
      {"time.snapshot_times", {[](C& c, const S& v) { c.snapshot_times = to_list(v); }, [](const C& c) { return list_str(c.snapshot_times); }}},
      {"micro.seeds",
       {[](C& c, const S& v) {
          c.seeds.clear();
          for (const auto& item : split(v, ',')) c.seeds.push_back(to_uint64(item));
        },
        [](const C& c) {
          S s;
          for (std::size_t i = 0; i < c.seeds.size(); ++i) s += (i ? "," : "") + std::to_string(c.seeds[i]);
          return s;
        }}},
      {"micro.kde_concentration", {[](C& c, const S& v) { c.kde_concentration = evaluate_expression(v); }, [](const C& c) { return num(c.kde_concentration); }}},
      {"sweep.kappa_range", {[](C& c, const S& v) { c.kappa_range = to_range(v); }, [](const C& c) { return range_str(c.kappa_range); }}},
      {"sweep.D_range", {[](C& c, const S& v) { c.D_range = to_range(v); }, [](const C& c) { return range_str(c.D_range); }}},
      {"sweep.ML_range", {[](C& c, const S& v) { c.ML_range = to_range(v); }, [](const C& c) { return range_str(c.ML_range); }}},
      {"sweep.refine_points", {[](C& c, const S& v) { c.refine_points = to_int(v); }, [](const C& c) { return std::to_string(c.refine_points); }}},
      {"sweep.model",
       {[](C& c, const S& v) {
          if (v == "macro") c.sweep_model = SweepModel::macro;
          else if (v == "micro") c.sweep_model = SweepModel::micro;
          else throw ConfigError("unknown sweep model '" + v + "' (macro, micro)");
        },
        [](const C& c) { return S(c.sweep_model == SweepModel::macro ? "macro" : "micro"); }}},
      {"sweep.total_agents", {[](C& c, const S& v) { c.total_agents = to_int64(v); }, [](const C& c) { return std::to_string(c.total_agents); }}},
      {"initial.leaders", {[](C& c, const S& v) { c.initial_leaders = v; }, [](const C& c) { return c.initial_leaders; }}},
      {"initial.followers", {[](C& c, const S& v) { c.initial_followers = v; }, [](const C& c) { return c.initial_followers; }}},
      {"feasibility.eps_H_rel", {[](C& c, const S& v) { c.eps_H_rel = evaluate_expression(v); }, [](const C& c) { return num(c.eps_H_rel); }}},
      {"feasibility.eps_G_rel", {[](C& c, const S& v) { c.eps_G_rel = evaluate_expression(v); }, [](const C& c) { return num(c.eps_G_rel); }}},
      {"feasibility.fallback", {[](C& c, const S& v) { c.fallback_synthesis = to_bool(v); }, [](const C& c) { return S(c.fallback_synthesis ? "true" : "false"); }}},
      {"basin.alpha", {[](C& c, const S& v) { c.basin_alpha = evaluate_expression(v); }, [](const C& c) { return opt_num(c.basin_alpha); }}},
      {"basin.beta", {[](C& c, const S& v) { c.basin_beta = evaluate_expression(v); }, [](const C& c) { return opt_num(c.basin_beta); }}},
      {"basin.gamma", {[](C& c, const S& v) { c.basin_gamma = evaluate_expression(v); }, [](const C& c) { return opt_num(c.basin_gamma); }}},
      {"basin.delta", {[](C& c, const S& v) { c.basin_delta = evaluate_expression(v); }, [](const C& c) { return opt_num(c.basin_delta); }}},
      {"basin.k", {[](C& c, const S& v) { c.basin_k = evaluate_expression(v); }, [](const C& c) { return opt_num(c.basin_k); }}},
      {"basin.samples", {[](C& c, const S& v) { c.basin_samples = to_int(v); }, [](const C& c) { return std::to_string(c.basin_samples); }}},
      {"basin.param_lo", {[](C& c, const S& v) { c.basin_lo = evaluate_expression(v); }, [](const C& c) { return num(c.basin_lo); }}},
      {"basin.param_hi", {[](C& c, const S& v) { c.basin_hi = evaluate_expression(v); }, [](const C& c) { return num(c.basin_hi); }}},
      {"basin.eta_fractions", {[](C& c, const S& v) { c.basin_eta_fractions = to_list(v); }, [](const C& c) { return list_str(c.basin_eta_fractions); }}},
      {"lemma.dt", {[](C& c, const S& v) { c.lemma_dt = evaluate_expression(v); }, [](const C& c) { return num(c.lemma_dt); }}},
      {"lemma.blowup", {[](C& c, const S& v) { c.lemma_blowup = evaluate_expression(v); }, [](const C& c) { return num(c.lemma_blowup); }}},
      {"output.dir", {[](C& c, const S& v) { c.output_dir = v; }, [](const C& c) { return c.output_dir; }}},
      {"output.percent_normalizer",
       {[](C& c, const S& v) {
          if (v != "initial" && v != "reference") throw ConfigError("output.percent_normalizer must be initial or reference");
          c.percent_normalizer = v;
        },
        [](const C& c) { return c.percent_normalizer; }}},
  };
  return table;
}

bool is_keyword(const std::string& v) { return v == "reference" || v == "uniform" || v == "target"; }

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty() || base_dir.empty() || is_keyword(p)) return p;
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

void validate(ScenarioConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.dim == 1 || c.dim == 2, "domain.dim must be 1 or 2");
  require(c.n >= 4 && c.n % 2 == 0, "domain.n must be an even integer >= 4");
  require(c.kappa > 0 && c.kappa1 > 0 && c.kappa2 > 0, "target concentrations must be positive");
  if (c.family == TargetFamily::von_mises) require(c.dim == 1, "target.family=von_mises needs domain.dim=1");
  if (c.family == TargetFamily::bimodal_von_mises)
    require(c.dim == 2, "target.family=bimodal_von_mises needs domain.dim=2");
  if (c.family == TargetFamily::tabulated) {
    require(!c.target_file.empty(), "target.family=tabulated needs target.file");
    require(std::filesystem::exists(c.target_file), "target.file does not exist: " + c.target_file);
  }
  for (const std::string* f : {&c.initial_leaders, &c.initial_followers})
    if (!is_keyword(*f)) require(std::filesystem::exists(*f), "initial density file does not exist: " + *f);
  require(c.initial_leaders == "reference" || c.initial_leaders == "uniform" || !is_keyword(c.initial_leaders),
          "initial.leaders must be reference, uniform or a file");
  require(c.initial_followers == "target" || c.initial_followers == "uniform" || !is_keyword(c.initial_followers),
          "initial.followers must be target, uniform or a file");
  require(c.fl_ell > 0, "kernels.fl.ell must be positive");
  c.ff.dim = c.dim;
  c.ff.images = c.images;
  try {
    c.ff.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("kernels.ff: ") + e.what());
  }
  require(c.images >= 0, "kernels.images must be >= 0");
  require(c.table_points >= 4 && c.table_points % 2 == 0, "kernels.table_points must be an even integer >= 4");
  require(c.D > 0, "physics.D must be positive");
  require(c.K > 0, "control.K must be positive");
  require(c.density_floor > 0, "control.density_floor must be positive");
  if (c.dim == 2) require(c.law == ControlLaw::poisson, "control.law=antiderivative is one-dimensional");
  require(c.dt > 0, "time.dt must be positive");
  require(c.T >= 0, "time.T must be nonnegative");
  require(c.output_stride >= 1, "time.output_stride must be >= 1");
  require(c.substeps >= 0, "time.substeps must be >= 0");
  require(!c.seeds.empty(), "micro.seeds must list at least one seed");
  require(c.kde_concentration > 0, "micro.kde_concentration must be positive");
  require(c.refine_points >= 0, "sweep.refine_points must be >= 0");
  require(c.total_agents >= 2, "sweep.total_agents must be >= 2");
  require(c.ML_range.lo > 0 && c.ML_range.hi < 1, "sweep.ML_range must lie inside (0, 1)");
  require(c.kappa_range.lo > 0, "sweep.kappa_range must be positive");
  require(c.D_range.lo > 0, "sweep.D_range must be positive");
  require(c.basin_samples >= 0, "basin.samples must be >= 0");
  require(c.basin_lo > 0 && c.basin_hi >= c.basin_lo, "basin.param_lo/param_hi must satisfy 0 < lo <= hi");
  require(c.lemma_dt > 0 && c.lemma_blowup > 0, "lemma.dt and lemma.blowup must be positive");

  if (c.M_F || c.M_L) {
    require(c.M_F && c.M_L, "masses.M_F and masses.M_L must be given together");
    require(*c.M_F > 0 && *c.M_F < 1 && *c.M_L > 0 && *c.M_L < 1, "masses must lie in (0, 1)");
    require(std::abs(*c.M_F + *c.M_L - 1.0) <= 1e-12,
            "masses.M_F + masses.M_L must equal 1 (leaders and followers share the unit total mass); got " +
                num(*c.M_F + *c.M_L));
  }
  if (c.N_F || c.N_L) {
    require(c.N_F && c.N_L, "counts.N_F and counts.N_L must be given together");
    require(*c.N_F >= 1 && *c.N_L >= 1, "counts must be >= 1");
    if (c.M_F)
      require(std::abs(*c.M_F - static_cast<double>(*c.N_F) / (*c.N_F + *c.N_L)) <= 1e-12,
              "masses.* disagree with counts.* (M_F must equal N_F / (N_F + N_L))");
  }
  const bool has_mass = c.M_F.has_value() || c.N_F.has_value();
  switch (c.mode) {
    case Mode::macro:
      require(has_mass, "mode macro needs masses.M_F/M_L or counts.N_F/N_L");
      break;
    case Mode::micro:
      require(c.N_F.has_value(), "mode micro needs counts.N_F and counts.N_L");
      break;
    case Mode::feasibility_map:
    case Mode::sweep_ml:
      require(c.dim == 1, "mode " + to_string(c.mode) + " is one-dimensional");
      break;
    case Mode::basin: {
      const int given = c.basin_alpha.has_value() + c.basin_beta.has_value() + c.basin_gamma.has_value() +
                        c.basin_delta.has_value() + c.basin_k.has_value();
      require(given == 0 || given == 5, "basin.alpha/beta/gamma/delta/k must be given all together or not at all");
      if (given == 0) require(has_mass || c.basin_samples > 0, "mode basin needs explicit constants, masses or samples");
      break;
    }
  }
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::feasibility_map: return "feasibility-map";
    case Mode::macro: return "macro";
    case Mode::micro: return "micro";
    case Mode::basin: return "basin";
    case Mode::sweep_ml: return "sweep-ml";
  }
  return "macro";
}

Mode mode_from_string(const std::string& s) {
  if (s == "feasibility-map") return Mode::feasibility_map;
  if (s == "macro") return Mode::macro;
  if (s == "micro") return Mode::micro;
  if (s == "basin") return Mode::basin;
  if (s == "sweep-ml") return Mode::sweep_ml;
  throw ConfigError("unknown mode '" + s + "' (feasibility-map, macro, micro, basin, sweep-ml)");
}

std::vector<double> Range::points() const {
  std::vector<double> out;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

double ScenarioConfig::follower_mass() const {
  if (M_F) return *M_F;
  if (N_F && N_L) return static_cast<double>(*N_F) / static_cast<double>(*N_F + *N_L);
  throw ConfigError("no follower mass configured");
}

double ScenarioConfig::leader_mass() const {
  if (M_L) return *M_L;
  if (N_F && N_L) return static_cast<double>(*N_L) / static_cast<double>(*N_F + *N_L);
  throw ConfigError("no leader mass configured");
}

double evaluate_expression(const std::string& text) { return ExprParser(trim(text)).parse(); }

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
  const auto& table = key_table();
  std::map<std::string, std::string> entries;
  std::vector<std::string> unknown;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (!table.count(key)) {
      unknown.push_back(key);
      continue;
    }
    if (entries.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    entries[key] = value;
  }
  if (!unknown.empty()) {
    std::string msg = "unknown configuration keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  if (!entries.count("mode")) throw ConfigError("missing required key: mode");
  ScenarioConfig c;
  for (const auto& [key, value] : entries) {
    try {
      table.at(key).set(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  // dimension- and mode-dependent defaults
  if (!entries.count("control.law")) c.law = c.dim == 2 ? ControlLaw::poisson : ControlLaw::antiderivative;
  if (!entries.count("micro.kde_concentration")) c.kde_concentration = c.dim == 2 ? 10.0 : 50.0;
  if (!entries.count("feasibility.fallback")) c.fallback_synthesis = c.mode == Mode::sweep_ml;
  if (!entries.count("domain.n") && c.dim == 2) c.n = 50;
  c.target_file = resolve_path(c.target_file, base_dir);
  c.initial_leaders = resolve_path(c.initial_leaders, base_dir);
  c.initial_followers = resolve_path(c.initial_followers, base_dir);
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), dir);
}

std::string serialize(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& [key, def] : key_table()) {
    auto v = def.get(cfg);
    if (v) out += key + " = " + *v + "\n";
  }
  return out;
}

}  // namespace densctl
