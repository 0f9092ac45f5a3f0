#include "ribound/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ribound/bounds.hpp"
#include "ribound/corollaries.hpp"
#include "ribound/errors.hpp"
#include "ribound/oracle.hpp"

namespace ribound {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

IneqForm to_form(const std::string& s) {
  if (s == "mixed") return IneqForm::kMixedKernel;
  if (s == "split") return IneqForm::kSplitKernel;
  throw std::invalid_argument("form must be \"mixed\" or \"split\", got \"" + s + "\"");
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* os = nullptr;
  explicit OutputTarget(const std::string& path) {
    if (path.empty()) {
      os = &std::cout;
    } else {
      file.open(path);
      if (!file) throw std::invalid_argument("cannot open output file: " + path);
      os = &file;
    }
  }
};

std::vector<Family> families_from(const std::string& name) {
  if (name == "all")
    return {Family::kGronwallLike, Family::kPower, Family::kLogEta, Family::kMixed};
  if (name == "power") return {Family::kPower};
  if (name == "gronwall") return {Family::kGronwallLike};
  if (name == "log") return {Family::kLogEta};
  if (name == "mixed") return {Family::kMixed};
  throw std::invalid_argument("unknown family \"" + name +
                              "\" (expected power|gronwall|log|mixed|all)");
}

const char* family_name(Family f) {
  switch (f) {
    case Family::kPower: return "power";
    case Family::kGronwallLike: return "gronwall";
    case Family::kLogEta: return "log";
    case Family::kMixed: return "mixed";
  }
  return "?";
}

double closed_form_value(const RunConfig& cfg, const ProblemInstance& inst, double t) {
  // The tagged presets all use kernels that depend on s only, so fixing the
  // first slot is exact.
  auto f1 = [&inst](double s) { return inst.f(0.0, s); };
  auto g1 = [&inst](double s) { return inst.g(0.0, s); };
  auto w1 = [&inst](double x) { return inst.w(x); };
  auto a1 = [&inst](double tv) { return inst.alpha(tv); };
  const PowerCaseParams p{cfg.cor_m, cfg.cor_n, cfg.cor_c};
  if (cfg.corollary == "power-mixed")
    return power_case_bound_mixed(p, f1, g1, w1, a1, t, cfg.quad_tol);
  if (cfg.corollary == "power-split")
    return power_case_bound_split(p, f1, g1, w1, a1, t, cfg.quad_tol);
  if (cfg.corollary == "log")
    return log_case_bound(cfg.cor_c, f1, w1, a1, cfg.cor_n, cfg.cor_x0, t, cfg.quad_tol);
  throw std::invalid_argument("unknown corollary tag \"" + cfg.corollary + "\"");
}

int report_validation(const ValidationReport& rep) {
  std::cerr << rep.str();
  return rep.pass ? 0 : 1;
}

int cmd_bound(const RunConfig& cfg) {
  const ProblemInstance inst = instance_from(cfg);
  const ValidationReport rep = validate(inst);
  if (report_validation(rep) != 0) return 1;

  BuildOptions opts;
  opts.quad_tol = cfg.quad_tol;
  TransformTables tables = TransformTables::build(inst, opts);
  TauSearch search;
  search.tol = cfg.tau_tol;
  const numerics::Grid grid = numerics::Grid::uniform(cfg.t_max, std::size_t(cfg.grid_n));
  const BoundCurve curve = evaluate_bound(inst, tables, grid, search, opts);

  OutputTarget target(cfg.out);
  std::ostream& os = *target.os;
  os << "# tau = " << fmt(curve.tau) << ", tau_capped = " << (curve.tau_capped ? 1 : 0)
     << ", x0 = " << fmt(tables.x0()) << ", x1 = " << fmt(tables.x1())
     << ", quad_tol = " << fmt(cfg.quad_tol) << ", tau_tol = " << fmt(cfg.tau_tol) << "\n";
  if (!cfg.corollary.empty()) {
    try {
      const double v = closed_form_value(cfg, inst, cfg.t_max);
      os << "# closed_form(" << cfg.corollary << ") at t_max = " << fmt(v)
         << ", engine = " << fmt(curve.values.back())
         << ", abs_diff = " << fmt(std::abs(v - curve.values.back())) << "\n";
    } catch (const Error& e) {
      os << "# closed_form(" << cfg.corollary << ") unavailable: " << e.what() << "\n";
    }
  }
  os << "t,bound,in_domain\n";
  for (std::size_t i = 0; i < grid.nodes.size(); ++i)
    os << fmt(grid.nodes[i]) << "," << fmt(curve.values[i]) << ","
       << (curve.in_domain[i] ? 1 : 0) << "\n";
  return 0;
}

int cmd_tau(const RunConfig& cfg) {
  const ProblemInstance inst = instance_from(cfg);
  const ValidationReport rep = validate(inst);
  if (report_validation(rep) != 0) return 1;

  BuildOptions opts;
  opts.quad_tol = cfg.quad_tol;
  TransformTables tables = TransformTables::build(inst, opts);
  TauSearch search;
  search.tol = cfg.tau_tol;
  const TauResult tr = compute_tau(inst, tables, search, opts);

  OutputTarget target(cfg.out);
  std::ostream& os = *target.os;
  const auto& psi = tables.psi_image();
  os << "tau = " << fmt(tr.tau) << "\n";
  os << "tau_capped = " << (tr.capped ? 1 : 0) << "\n";
  os << "psi = " << (psi.bounded ? "bounded" : "unbounded") << "\n";
  os << "psi_sup = " << (psi.bounded ? fmt(psi.sup) : std::string("inf")) << "\n";
  os << "x0 = " << fmt(tables.x0()) << "\n";
  os << "x1 = " << fmt(tables.x1()) << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const ProblemInstance inst = instance_from(cfg);
  const ValidationReport rep = validate(inst);
  if (report_validation(rep) != 0) return 1;

  BuildOptions opts;
  opts.quad_tol = cfg.quad_tol;
  TransformTables tables = TransformTables::build(inst, opts);
  TauSearch search;
  search.tol = cfg.tau_tol;
  const numerics::Grid grid = numerics::Grid::uniform(cfg.t_max, std::size_t(cfg.verify_grid_n));
  BoundCurve curve = evaluate_bound(inst, tables, grid, search, opts);
  for (double& v : curve.values) v *= cfg.scale_bound;

  const EqualitySolution sol = solve_equality(inst, grid, cfg.max_iter, cfg.oracle_tol);
  const DominanceReport dom = check_dominance(sol, curve, cfg.rel_slack, cfg.abs_slack);

  OutputTarget target(cfg.out);
  std::ostream& os = *target.os;
  os << "# pass = " << (dom.pass ? 1 : 0) << ", max_violation = " << fmt(dom.max_violation)
     << ", worst_t = " << fmt(grid.nodes[dom.worst_node])
     << ", compared = " << dom.compared_nodes << ", tau = " << fmt(curve.tau)
     << ", oracle_converged = " << (sol.converged ? 1 : 0)
     << ", oracle_iterations = " << sol.iterations << ", blowup_index = "
     << (sol.blowup_index ? fmt(double(*sol.blowup_index)) : std::string("none")) << "\n";
  os << "t,bound,oracle,margin,in_domain\n";
  for (std::size_t i = 0; i < grid.nodes.size(); ++i)
    os << fmt(grid.nodes[i]) << "," << fmt(curve.values[i]) << "," << fmt(sol.u[i]) << ","
       << fmt(dom.margins[i]) << "," << (curve.in_domain[i] ? 1 : 0) << "\n";

  if (!sol.converged) return 3;
  return dom.pass ? 0 : 2;
}

int cmd_batch(const RunConfig& cfg) {
  const std::vector<Family> fams = families_from(cfg.family);
  OutputTarget target(cfg.out);
  std::ostream& os = *target.os;
  os << "seed,family,form,t_max,x0,x1,tau,grid_n,compared,max_violation,converged,pass\n";

  int violations = 0, numerical = 0;
  for (int k = 0; k < cfg.seeds; ++k) {
    const std::uint64_t seed = cfg.seed + std::uint64_t(k);
    const Family fam = fams[std::size_t(k) % fams.size()];
    try {
      const ProblemInstance inst = generate_random_instance(seed, fam);
      BuildOptions opts;
      opts.quad_tol = cfg.quad_tol;
      TransformTables tables = TransformTables::build(inst, opts);
      DominanceRun run = verify_instance(inst, tables, 0.9, std::size_t(cfg.batch_grid_n), 2,
                                         cfg.rel_slack, cfg.abs_slack);
      if (cfg.scale_bound != 1.0) {
        for (double& v : run.curve.values) v *= cfg.scale_bound;
        run.report = check_dominance(run.sol, run.curve, cfg.rel_slack, cfg.abs_slack);
      }
      const bool ok = run.report.pass && run.sol.converged;
      if (!ok) ++violations;
      os << seed << "," << family_name(fam) << ","
         << (inst.form == IneqForm::kMixedKernel ? "mixed" : "split") << "," << fmt(inst.t_max)
         << "," << fmt(tables.x0()) << "," << fmt(tables.x1()) << "," << fmt(run.curve.tau)
         << "," << run.grid_n << "," << run.report.compared_nodes << ","
         << fmt(run.report.max_violation) << "," << (run.sol.converged ? 1 : 0) << ","
         << (ok ? 1 : 0) << "\n";
    } catch (const Error& e) {
      ++numerical;
      os << seed << "," << family_name(fam) << ",error,,,,,,,,," << 0 << "\n";
      std::cerr << "seed " << seed << " (" << family_name(fam) << "): " << e.what() << "\n";
    }
  }
  if (numerical > 0) return 3;
  return violations > 0 ? 2 : 0;
}

}  // namespace

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  if (name == "gronwall") {
    // u <= 1 + int_0^t u: the classical exponential bound.
    cfg.phi = "x";
    cfg.c = "1";
    cfg.eta = "x";
    cfg.w = "1";
    cfg.alpha = "t";
    cfg.f = "1";
    cfg.g = "0";
    cfg.t_max = 1.0;
  } else if (name == "blowup") {
    // u <= 1 + int_0^t u^2: bound 1/(1-t), finite horizon at 1.
    cfg.phi = "x";
    cfg.c = "1";
    cfg.eta = "x";
    cfg.w = "x";
    cfg.alpha = "t";
    cfg.f = "1";
    cfg.g = "0";
    cfg.t_max = 1.5;
  } else if (name == "lipovan") {
    // u^2 <= 1 + int_0^{t/2} 2u: delayed square-root growth, closed form
    // (1 + a(t)/2)^... reduces to the power case with m=2, n=1.
    cfg.phi = "x^2";
    cfg.c = "1";
    cfg.eta = "2*x";
    cfg.w = "1";
    cfg.alpha = "t/2";
    cfg.f = "1";
    cfg.g = "0";
    cfg.x0 = 0.0;
    cfg.t_max = 1.0;
    cfg.corollary = "power-mixed";
    cfg.cor_m = 2.0;
    cfg.cor_n = 1.0;
    cfg.cor_c = 1.0;
  } else if (name == "powermix") {
    cfg.phi = "x^2";
    cfg.c = "1";
    cfg.eta = "2*x";
    cfg.w = "1+x/4";
    cfg.alpha = "t/2";
    cfg.f = "1+s/2";
    cfg.g = "0.25";
    cfg.form = "mixed";
    cfg.x0 = 0.0;
    cfg.t_max = 1.0;
    cfg.corollary = "power-mixed";
    cfg.cor_m = 2.0;
    cfg.cor_n = 1.0;
    cfg.cor_c = 1.0;
  } else if (name == "powersplit") {
    cfg.phi = "x^2";
    cfg.c = "1";
    cfg.eta = "2*x";
    cfg.w = "1+x/4";
    cfg.alpha = "t/2";
    cfg.f = "1+s/2";
    cfg.g = "0.2";
    cfg.form = "split";
    cfg.x0 = 0.0;
    cfg.t_max = 1.0;
    cfg.corollary = "power-split";
    cfg.cor_m = 2.0;
    cfg.cor_n = 1.0;
    cfg.cor_c = 1.0;
  } else if (name == "log") {
    cfg.phi = "x";
    cfg.c = "2";
    cfg.eta = "(x+1)*ln(x+1)";
    cfg.w = "1";
    cfg.alpha = "t/2";
    cfg.f = "0.5";
    cfg.g = "0";
    cfg.x0 = 1.0;
    cfg.t_max = 1.0;
    cfg.corollary = "log";
    cfg.cor_n = 1.0;
    cfg.cor_c = 2.0;
    cfg.cor_x0 = 1.0;
  } else {
    throw std::invalid_argument("unknown preset \"" + name + "\"");
  }
  return cfg;
}

void apply_json(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse failure: ") + e.what());
  }
  static const std::set<std::string> known = {
      "phi",        "c",          "eta",        "w",         "alpha",      "f",
      "g",          "x0",         "x1",         "form",      "t_max",      "grid_n",
      "verify_grid_n", "batch_grid_n", "quad_tol", "tau_tol", "max_iter",  "oracle_tol",
      "rel_slack",  "abs_slack",  "scale_bound", "seed",     "seeds",      "family",
      "corollary",  "out"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw std::invalid_argument("config: unknown key \"" + item.key() + "\"");

  auto str = [&](const char* k, std::string& dst) {
    if (j.contains(k)) dst = j.at(k).get<std::string>();
  };
  auto dbl = [&](const char* k, double& dst) {
    if (j.contains(k)) dst = j.at(k).get<double>();
  };
  auto integer = [&](const char* k, int& dst) {
    if (j.contains(k)) dst = j.at(k).get<int>();
  };
  auto opt = [&](const char* k, std::optional<double>& dst) {
    if (!j.contains(k)) return;
    if (j.at(k).is_null())
      dst.reset();
    else
      dst = j.at(k).get<double>();
  };
  str("phi", cfg.phi);
  str("c", cfg.c);
  str("eta", cfg.eta);
  str("w", cfg.w);
  str("alpha", cfg.alpha);
  str("f", cfg.f);
  str("g", cfg.g);
  opt("x0", cfg.x0);
  opt("x1", cfg.x1);
  str("form", cfg.form);
  dbl("t_max", cfg.t_max);
  integer("grid_n", cfg.grid_n);
  integer("verify_grid_n", cfg.verify_grid_n);
  integer("batch_grid_n", cfg.batch_grid_n);
  dbl("quad_tol", cfg.quad_tol);
  dbl("tau_tol", cfg.tau_tol);
  integer("max_iter", cfg.max_iter);
  dbl("oracle_tol", cfg.oracle_tol);
  dbl("rel_slack", cfg.rel_slack);
  dbl("abs_slack", cfg.abs_slack);
  dbl("scale_bound", cfg.scale_bound);
  integer("seeds", cfg.seeds);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  str("family", cfg.family);
  str("out", cfg.out);
  if (j.contains("corollary")) {
    const auto& co = j.at("corollary");
    if (co.is_null()) {
      cfg.corollary.clear();
    } else {
      cfg.corollary = co.at("kind").get<std::string>();
      if (co.contains("m")) cfg.cor_m = co.at("m").get<double>();
      if (co.contains("n")) cfg.cor_n = co.at("n").get<double>();
      if (co.contains("c")) cfg.cor_c = co.at("c").get<double>();
      if (co.contains("x0")) cfg.cor_x0 = co.at("x0").get<double>();
    }
  }
}

ProblemInstance instance_from(const RunConfig& cfg) {
  return make_problem(cfg.phi, cfg.c, cfg.eta, cfg.w, cfg.alpha, cfg.f, cfg.g,
                      to_form(cfg.form), cfg.t_max, cfg.x0, cfg.x1);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"a priori bounds for retarded integral inequalities"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_path, family, scale_unused;
  std::optional<int> grid_flag, seeds_flag, max_iter_flag;
  std::optional<double> tol_flag, t_max_flag, scale_flag, oracle_tol_flag;
  std::optional<std::uint64_t> seed_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--preset", preset_name, "built-in configuration name");
    sub->add_option("--out", out_path, "write output here instead of stdout");
    sub->add_option("--grid", grid_flag, "grid node count");
    sub->add_option("--tol", tol_flag, "quadrature tolerance");
    sub->add_option("--t-max", t_max_flag, "horizon override");
  };

  CLI::App* bound = app.add_subcommand("bound", "evaluate the a priori bound on a grid");
  add_common(bound);
  CLI::App* verify =
      app.add_subcommand("verify", "compare the bound against the equality-case solution");
  add_common(verify);
  verify->add_option("--scale-bound", scale_flag,
                     "multiply the bound before comparison (self-test hook)");
  verify->add_option("--max-iter", max_iter_flag, "iteration cap for the equality solver");
  verify->add_option("--oracle-tol", oracle_tol_flag, "convergence tolerance for the solver");
  CLI::App* tau = app.add_subcommand("tau", "report the validity horizon");
  add_common(tau);
  CLI::App* batch = app.add_subcommand("batch", "verify a stream of generated instances");
  add_common(batch);
  batch->add_option("--seed", seed_flag, "first seed");
  batch->add_option("--seeds", seeds_flag, "number of instances");
  batch->add_option("--family", family, "power|gronwall|log|mixed|all");
  batch->add_option("--scale-bound", scale_flag,
                    "multiply the bound before comparison (self-test hook)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg = preset_name.empty() ? RunConfig{} : preset(preset_name);
    if (!config_path.empty()) apply_json(cfg, config_path);
    if (!out_path.empty()) cfg.out = out_path;
    if (grid_flag) cfg.grid_n = cfg.verify_grid_n = cfg.batch_grid_n = *grid_flag;
    if (tol_flag) cfg.quad_tol = *tol_flag;
    if (t_max_flag) cfg.t_max = *t_max_flag;
    if (scale_flag) cfg.scale_bound = *scale_flag;
    if (max_iter_flag) cfg.max_iter = *max_iter_flag;
    if (oracle_tol_flag) cfg.oracle_tol = *oracle_tol_flag;
    if (seed_flag) cfg.seed = *seed_flag;
    if (seeds_flag) cfg.seeds = *seeds_flag;
    if (!family.empty()) cfg.family = family;

    if (bound->parsed()) return cmd_bound(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (tau->parsed()) return cmd_tau(cfg);
    if (batch->parsed()) return cmd_batch(cfg);
    return 1;
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ribound
