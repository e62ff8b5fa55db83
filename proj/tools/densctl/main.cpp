#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "densctl/config.hpp"
#include "densctl/error.hpp"
#include "modes.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Leader-follower density control: feasibility maps, macro and micro runs, basin studies, leader-mass sweeps"};
  cli.set_version_flag("--version", "densctl 0.1.0");
  std::string mode, config_path;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  cli.add_option("mode", mode, "feasibility-map | macro | micro | basin | sweep-ml")
      ->required()
      ->check(CLI::IsMember({"feasibility-map", "macro", "micro", "basin", "sweep-ml"}));
  cli.add_option("--config", config_path, "scenario file (key = value lines)")->required();
  cli.add_option("--jobs", jobs, "worker threads (fallback: DENSCTL_JOBS, then 1)");
  cli.add_option("--seed", seed, "master seed; replaces micro.seeds with S, S+1, ...");
  cli.add_option("--out", out, "output root (overrides output.dir)");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 1;
  }

  densctl::app::RunOptions opts;
  densctl::ScenarioConfig cfg;
  try {
    opts.jobs = densctl::app::resolve_jobs(jobs);
    opts.seed = seed;
    opts.out_dir = out;
    std::ifstream is(config_path);
    if (!is) throw densctl::ConfigError("cannot open config file " + config_path);
    std::stringstream text;
    text << is.rdbuf();
    // The command-line mode fills in a missing `mode` key.
    static const std::regex has_mode(R"((^|\n)[ \t]*mode[ \t]*=)");
    std::string body = text.str();
    if (!std::regex_search(body, has_mode)) body = "mode = " + mode + "\n" + body;
    cfg = densctl::parse_config(body, std::filesystem::path(config_path).parent_path().string());
    if (densctl::to_string(cfg.mode) != mode)
      throw densctl::ConfigError("config file declares mode = " + densctl::to_string(cfg.mode) +
                                 " but the command line asks for " + mode);
  } catch (const std::exception& e) {
    std::cerr << "densctl: config error: " << e.what() << "\n";
    return 1;
  }
  return static_cast<int>(densctl::app::run_mode(cfg, opts, std::cerr).code);
}
