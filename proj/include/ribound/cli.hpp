#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ribound/problem.hpp"

namespace ribound {

/// Everything a CLI run needs: the instance (as expression strings, so
/// configs stay plain JSON), numeric knobs, and an optional closed-form
/// cross-check attached to presets whose instance matches a special case.
struct RunConfig {
  std::string phi = "x", c = "1", eta = "x", w = "1", alpha = "t", f = "1", g = "0";
  std::optional<double> x0, x1;
  std::string form = "mixed";  // or "split"
  double t_max = 1.0;

  int grid_n = 201;
  int verify_grid_n = 8001;
  int batch_grid_n = 801;
  double quad_tol = 1e-10;
  double tau_tol = 1e-6;
  int max_iter = 200;
  double oracle_tol = 1e-9;
  double rel_slack = 1e-6;
  double abs_slack = 1e-8;
  double scale_bound = 1.0;  // self-test hook: scales the bound before comparison

  std::uint64_t seed = 1;
  int seeds = 50;
  std::string family = "all";  // power | gronwall | log | mixed | all

  std::string corollary;  // "", "power-mixed", "power-split", "log"
  double cor_m = 2.0, cor_n = 1.0, cor_c = 1.0, cor_x0 = 0.5;

  std::string out;  // output path; empty = stdout
};

RunConfig preset(const std::string& name);
void apply_json(RunConfig& cfg, const std::string& path);
ProblemInstance instance_from(const RunConfig& cfg);

/// Exit codes: 0 success, 1 validation/config failure, 2 dominance or
/// self-check failure, 3 numerical failure (domain, bracketing, quadrature).
int run_cli(int argc, char** argv);

}  // namespace ribound
