#pragma once

#include <cstdint>
#include <optional>

#include "ribound/bounds.hpp"
#include "ribound/numerics.hpp"
#include "ribound/problem.hpp"

namespace ribound {

/// Numerical solution of the equality version of the inequality (its
/// extremal case) by marching Picard iteration with trapezoidal
/// accumulation. Deliberately shares no quadrature machinery with the bound
/// engine.
struct EqualitySolution {
  numerics::Grid grid;
  std::vector<double> z;  // fixed point of the right-hand side
  std::vector<double> u;  // first-transform preimage of z
  bool converged = false;
  std::optional<std::size_t> blowup_index;  // first node past the growth cap
  int iterations = 0;
};

/// Picard-iterates z(t) = c(t) + (form-appropriate kernel integrals of the
/// nonlinearity) starting from z = c, marching in t. Nodes whose value
/// passes 1e12 freeze there and set blowup_index; convergence is measured
/// on the live prefix.
EqualitySolution solve_equality(const ProblemInstance& inst, const numerics::Grid& grid,
                                int max_iter = 200, double tol = 1e-9);

struct DominanceReport {
  bool pass = true;
  double max_violation = 0.0;   // max of u - (bound*(1+rel) + abs); negative = margin
  std::size_t worst_node = 0;
  std::vector<double> margins;  // per node: bound*(1+rel) + abs - u; NaN where skipped
  std::size_t compared_nodes = 0;
};

/// Node-wise comparison of the oracle solution against a bound curve on the
/// nodes that are in-domain, at or below the curve's tau, and before any
/// oracle blow-up.
DominanceReport check_dominance(const EqualitySolution& sol, const BoundCurve& curve,
                                double rel_slack = 1e-6, double abs_slack = 1e-8);

enum class Family { kPower, kGronwallLike, kLogEta, kMixed };

/// Deterministic instance from (seed, family), constructed to satisfy every
/// validated hypothesis, with the horizon shortened until a coarse solve of
/// the equality case stays mild enough for the trapezoid oracle to resolve.
ProblemInstance generate_random_instance(std::uint64_t seed, Family family);

struct DominanceRun {
  BoundCurve curve;
  EqualitySolution sol;
  DominanceReport report;
  std::size_t grid_n = 0;
};

/// Full bound-vs-oracle comparison on a uniform grid over [0, frac * tau].
/// On violation the grid is refined (up to `escalations` doublings) so
/// oracle discretization error cannot masquerade as a bound failure; the
/// report of the finest grid decides.
DominanceRun verify_instance(const ProblemInstance& inst, TransformTables& tables,
                             double frac = 0.9, std::size_t base_n = 801, int escalations = 2,
                             double rel_slack = 1e-6, double abs_slack = 1e-8);

}  // namespace ribound
