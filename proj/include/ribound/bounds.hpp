#pragma once

#include <limits>
#include <memory>

#include "ribound/numerics.hpp"
#include "ribound/problem.hpp"

namespace ribound {

struct BuildOptions {
  double quad_tol = 1e-10;
  double table_ratio = 1.01;  // geometric anchor growth of the memo tables
  double invert_tol = 1e-10;
  double divergence_tol = 1e-6;
};

/// Numerical realization of the two nested transforms
///   G(x)   = int_{x0}^x ds / eta(phi_inv(s)),
///   Psi(x) = int_{x1}^x ds / w(phi_inv(G_inv(s))),
/// tabulated lazily on geometric anchor grids, together with image-supremum
/// probes for both. Cheap to copy (shared state).
class TransformTables {
 public:
  /// Resolves x0 (default: 0 when the integrand is summable at 0, else
  /// c(0)/2) and x1 (default 1), then tabulates. Throws DomainError for an
  /// inadmissible x0/x1 and QuadratureError on irrecoverable integration
  /// failure.
  static TransformTables build(const ProblemInstance& inst, const BuildOptions& opts = {});

  double G(double x);
  double G_inv(double y);
  double Psi(double x);
  double Psi_inv(double y);
  double phi_inv(double s);

  const numerics::ImageProbe& psi_image() const;
  const numerics::ImageProbe& G_image() const;
  double x0() const;
  double x1() const;

 private:
  struct Impl;
  explicit TransformTables(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

struct TauSearch {
  double delta = std::numeric_limits<double>::infinity();  // horizon cap for the search
  double tol = 1e-6;                                       // bisection width on tau
  double safety_margin = 1e-6;  // relative shrink applied to the image supremum
};

struct TauResult {
  double tau = 0.0;
  bool capped = false;  // tau hit the horizon with the domain predicate intact
};

/// p(t) = G(c(t)) + int_0^{alpha(t)} g(t, s) ds.
double p_eval(const ProblemInstance& inst, TransformTables& tables, double t,
              const BuildOptions& opts = {});

/// int_0^{alpha(t)} f(t, s) ds.
double f_integral(const ProblemInstance& inst, double t, const BuildOptions& opts = {});

/// The g-kernel integral in the form the instance declares: upper limit
/// alpha(t) for the mixed-kernel shape, t for the split-kernel shape.
double g_integral(const ProblemInstance& inst, double t, const BuildOptions& opts = {});

/// Largest t <= min(t_max, delta) for which the domain-membership predicate
/// holds (argument of the outer inverse stays below the image supremum
/// shrunk by the safety margin). Returns the horizon with capped = true when
/// the predicate never fails, in particular whenever the second transform is
/// unbounded. Throws DomainError when the predicate fails already at t = 0.
TauResult compute_tau(const ProblemInstance& inst, TransformTables& tables,
                      const TauSearch& search = {}, const BuildOptions& opts = {});

struct BoundCurve {
  numerics::Grid grid;
  std::vector<double> values;     // NaN marker where out of domain
  std::vector<bool> in_domain;
  double tau = 0.0;
  bool tau_capped = false;
};

/// A-priori bound for the mixed-kernel inequality shape:
///   values[i] = phi_inv( G_inv( Psi_inv[ Psi(p(t_i)) + f_integral(t_i) ] ) ).
/// Nodes whose composite leaves the transform domains get the marker.
BoundCurve bound_mixed_kernel(const ProblemInstance& inst, TransformTables& tables,
                              const numerics::Grid& grid, const TauSearch& search = {},
                              const BuildOptions& opts = {});

/// A-priori bound for the split-kernel shape:
///   values[i] = phi_inv( G_inv( Psi_inv[ Psi(G(c(t_i))) + f_integral(t_i)
///               + g_integral(t_i) ] ) ).
BoundCurve bound_split_kernel(const ProblemInstance& inst, TransformTables& tables,
                              const numerics::Grid& grid, const TauSearch& search = {},
                              const BuildOptions& opts = {});

/// Dispatches on inst.form.
BoundCurve evaluate_bound(const ProblemInstance& inst, TransformTables& tables,
                          const numerics::Grid& grid, const TauSearch& search = {},
                          const BuildOptions& opts = {});

}  // namespace ribound
