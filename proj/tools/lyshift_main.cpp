// Command-line front end: analyze weight sequences for chaotic behaviour,
// trace orbits, construct scrambled-family and nested-tree witnesses, and
// re-verify saved witness artifacts. All heavy lifting lives in the library;
// this file only maps flags onto RunConfig.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lyshift/cli.hpp"
#include "lyshift/errors.hpp"
#include "lyshift/io.hpp"
#include "lyshift/version.hpp"

namespace {

void add_common(CLI::App* cmd, lyshift::RunConfig& cfg, std::string& range, std::string& norm,
                bool& serial) {
  cmd->add_option("--weights", cfg.weights_path, "weight sequence spec file")->required();
  cmd->add_option("--horizon", cfg.params.horizon, "largest window length scanned");
  cmd->add_option("--theta-div", cfg.params.theta_div, "divergence log-product threshold");
  cmd->add_option("--theta-dec", cfg.params.theta_dec, "prefix-decay log threshold");
  cmd->add_option("--range", range, "window end-index range LO:HI (bilateral scans)");
  cmd->add_option("--p", norm, "norm: 1, 2, or inf");
  cmd->add_option("--decay-levels", cfg.params.decay_levels, "prefix-decay levels requested");
  cmd->add_option("--support-bound", cfg.params.support_bound,
                  "support bound for null-orbit witnesses");
  cmd->add_option("--out", cfg.out_path, "write the report or artifact here (default stdout)");
  cmd->add_option("--seed", cfg.seed, "seed for sampled spot checks");
  cmd->add_flag("--serial", serial, "disable parallel window scans");
}

void apply_common(lyshift::RunConfig& cfg, const std::string& range, const std::string& norm,
                  bool serial) {
  if (!range.empty()) {
    const std::size_t colon = range.find(':');
    if (colon == std::string::npos)
      throw lyshift::MalformedSpec("--range expects LO:HI, got '" + range + "'");
    cfg.params.k_lo = std::stoll(range.substr(0, colon));
    cfg.params.k_hi = std::stoll(range.substr(colon + 1));
  }
  if (!norm.empty()) cfg.params.norm = lyshift::parse_norm(norm);
  if (serial) cfg.params.exec = lyshift::Exec::Serial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"backward weighted shift chaos analyzer"};
  app.set_version_flag("--version",
                       std::string(lyshift::kToolName) + " " + lyshift::kToolVersion);
  app.require_subcommand(1);

  lyshift::RunConfig cfg;
  std::string range, norm;
  bool serial = false;

  auto* analyze = app.add_subcommand(
      "analyze", "decide chaos, sensitivity, and dense null orbits for a weight sequence");
  add_common(analyze, cfg, range, norm, serial);

  auto* orbit = app.add_subcommand("orbit", "log-norm table along an orbit");
  add_common(orbit, cfg, range, norm, serial);
  std::string vec, vec2, times = "1..16";
  orbit->add_option("--vector", vec, "finite-support vector, e.g. 1:1,5:-0.25")->required();
  orbit->add_option("--vector2", vec2, "second vector; adds a log-distance column");
  orbit->add_option("--times", times, "times, e.g. 1,2,5 or 1..8");

  auto* scramble =
      app.add_subcommand("scramble", "construct a uniformly scrambled family witness");
  add_common(scramble, cfg, range, norm, serial);
  std::string targets;
  scramble->add_option("--targets", targets, "target balls file")->required();
  scramble->add_option("--levels", cfg.levels, "schedule levels to certify");

  auto* tree = app.add_subcommand("tree", "construct a nested perturbation tree witness");
  add_common(tree, cfg, range, norm, serial);
  std::string basis;
  tree->add_option("--basis", basis, "basis balls file (one per level)")->required();
  tree->add_option("--depth", cfg.depth, "tree depth to certify");

  auto* verify = app.add_subcommand("verify", "re-verify a saved witness or tree artifact");
  add_common(verify, cfg, range, norm, serial);
  std::string artifact;
  verify->add_option("artifact", artifact, "witness or tree file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    apply_common(cfg, range, norm, serial);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (app.got_subcommand(analyze)) return lyshift::run_analyze(cfg);
  if (app.got_subcommand(orbit)) return lyshift::run_orbit(cfg, vec, vec2, times);
  if (app.got_subcommand(scramble)) return lyshift::run_scramble(cfg, targets);
  if (app.got_subcommand(tree)) return lyshift::run_tree(cfg, basis);
  return lyshift::run_verify(cfg, artifact);
}
