#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ribound/bounds.hpp"
#include "ribound/oracle.hpp"
#include "ribound/problem.hpp"

using namespace ribound;

TEST_CASE("equality solve with no kernels inverts the first function") {
  ProblemInstance inst =
      make_problem("x^2", "1+t", "x", "1", "t/2", "0", "0", IneqForm::kMixedKernel, 1.0);
  const numerics::Grid grid = numerics::Grid::uniform(1.0, 101);
  EqualitySolution sol = solve_equality(inst, grid);
  REQUIRE(sol.converged);
  CHECK(sol.iterations <= 3);
  CHECK(sol.z[0] == 1.0);  // z(0) = c(0), no quadrature involved
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(sol.z[i] == doctest::Approx(1.0 + grid[i]).epsilon(1e-12));
    CHECK(sol.u[i] == doctest::Approx(std::sqrt(1.0 + grid[i])).epsilon(1e-10));
  }
  CHECK_FALSE(sol.blowup_index.has_value());
}

TEST_CASE("equality solve reproduces exponential growth") {
  // u = 1 + int_0^t u has the fixed point e^t
  ProblemInstance inst =
      make_problem("x", "1", "x", "1", "t", "1", "0", IneqForm::kMixedKernel, 1.0);
  EqualitySolution sol = solve_equality(inst, numerics::Grid::uniform(1.0, 2001));
  REQUIRE(sol.converged);
  CHECK_FALSE(sol.blowup_index.has_value());
  CHECK(std::abs(sol.u.back() - std::exp(1.0)) <= 1e-5);

  // trapezoid refinement should shrink the error at second order
  const double e401 =
      std::abs(solve_equality(inst, numerics::Grid::uniform(1.0, 401)).u.back() - std::exp(1.0));
  const double e801 =
      std::abs(solve_equality(inst, numerics::Grid::uniform(1.0, 801)).u.back() - std::exp(1.0));
  CHECK(e401 / e801 >= 2.5);
  CHECK(e401 / e801 <= 6.0);
}

TEST_CASE("equality solve detects finite-time escape") {
  // u = 1 + int_0^t u^2 blows up at t = 1 like 1/(1-t)
  ProblemInstance inst =
      make_problem("x", "1", "x", "x", "t", "1", "0", IneqForm::kMixedKernel, 1.25);
  EqualitySolution sol = solve_equality(inst, numerics::Grid::uniform(1.25, 2001));
  REQUIRE(sol.converged);
  CHECK(sol.u[800] == doctest::Approx(2.0).epsilon(1e-4));  // node at t = 0.5 exactly
  REQUIRE(sol.blowup_index.has_value());
  const double t_escape = sol.grid[*sol.blowup_index];
  CHECK(t_escape >= 0.98);
  CHECK(t_escape <= 1.10);
  CHECK(sol.z.back() >= 1e12);  // frozen at the cap past the escape
}

TEST_CASE("split form weights the unretarded kernel with both nonlinearities") {
  // phi = u, eta = u, w = 1, f = 0, g = 1 over [0, t]: u = c e^t with c = 1
  ProblemInstance inst =
      make_problem("x", "1", "x", "1", "t/2", "0", "1", IneqForm::kSplitKernel, 1.0);
  EqualitySolution sol = solve_equality(inst, numerics::Grid::uniform(1.0, 2001));
  REQUIRE(sol.converged);
  CHECK(std::abs(sol.u.back() - std::exp(1.0)) <= 1e-5);
}

TEST_CASE("dominance check accepts a valid bound and flags a shaved one") {
  ProblemInstance inst =
      make_problem("x", "1", "x", "1", "t", "1", "0", IneqForm::kMixedKernel, 1.0);
  TransformTables tables = TransformTables::build(inst);
  const numerics::Grid grid = numerics::Grid::uniform(1.0, 2001);
  BoundCurve curve = bound_mixed_kernel(inst, tables, grid);
  EqualitySolution sol = solve_equality(inst, grid);
  REQUIRE(sol.converged);

  DominanceReport ok = check_dominance(sol, curve);
  CHECK(ok.pass);
  CHECK(ok.compared_nodes == grid.size());
  CHECK(ok.max_violation <= 0.0);
  CHECK(ok.margins.size() == grid.size());

  for (double& v : curve.values) v *= 0.999;  // undercut the certificate
  DominanceReport bad = check_dominance(sol, curve);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_violation > 1e-4);
  CHECK(bad.worst_node > 0);
}

TEST_CASE("dominance check requires matching grids") {
  ProblemInstance inst =
      make_problem("x", "1", "x", "1", "t", "1", "0", IneqForm::kMixedKernel, 1.0);
  TransformTables tables = TransformTables::build(inst);
  BoundCurve curve = bound_mixed_kernel(inst, tables, numerics::Grid::uniform(1.0, 101));
  EqualitySolution sol = solve_equality(inst, numerics::Grid::uniform(1.0, 51));
  CHECK_THROWS_AS(check_dominance(sol, curve), std::invalid_argument);
}

TEST_CASE("generated instances are deterministic in the seed") {
  for (Family fam : {Family::kPower, Family::kGronwallLike, Family::kLogEta, Family::kMixed}) {
    ProblemInstance a = generate_random_instance(42, fam);
    ProblemInstance b = generate_random_instance(42, fam);
    CHECK(a.phi.expr.str() == b.phi.expr.str());
    CHECK(a.c.expr.str() == b.c.expr.str());
    CHECK(a.eta.expr.str() == b.eta.expr.str());
    CHECK(a.w.expr.str() == b.w.expr.str());
    CHECK(a.alpha.expr.str() == b.alpha.expr.str());
    CHECK(a.f.expr.str() == b.f.expr.str());
    CHECK(a.g.expr.str() == b.g.expr.str());
    CHECK(a.t_max == b.t_max);
    CHECK(a.form == b.form);
    ProblemInstance c = generate_random_instance(43, fam);
    const bool differs = a.c.expr.str() != c.c.expr.str() || a.f.expr.str() != c.f.expr.str() ||
                         a.t_max != c.t_max || a.alpha.expr.str() != c.alpha.expr.str();
    CHECK(differs);
  }
}

TEST_CASE("generated instances satisfy every sampled hypothesis") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    for (Family fam : {Family::kPower, Family::kGronwallLike, Family::kLogEta, Family::kMixed}) {
      ProblemInstance inst = generate_random_instance(seed, fam);
      ValidationReport report = validate(inst, 128);
      if (!report.pass) {
        CAPTURE(seed);
        CAPTURE(static_cast<int>(fam));
        FAIL_CHECK(report.str());
      }
    }
  }
}

TEST_CASE("end-to-end verification of a generated instance") {
  ProblemInstance inst = generate_random_instance(3, Family::kGronwallLike);
  TransformTables tables = TransformTables::build(inst);
  DominanceRun run = verify_instance(inst, tables, 0.9, 401, 2);
  CHECK(run.sol.converged);
  CHECK(run.report.pass);
  CHECK(run.report.compared_nodes > 0);
  CHECK(run.grid_n >= 401);
}
