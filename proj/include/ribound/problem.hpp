#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ribound/expr.hpp"

namespace ribound {

enum class ScalarRole { kPhi, kC, kEta, kW, kAlpha };
enum class KernelRole { kF, kG };

/// One-variable model function with its hypothesis role attached.
struct ScalarFn {
  Expr expr;
  ScalarRole role;

  double operator()(double x) const { return expr.eval(x); }
};

/// Two-variable kernel over (t, s).
struct Kernel {
  Expr expr;
  KernelRole role;

  double operator()(double t, double s) const { return expr.eval(t, s); }
};

/// Shape of the inequality being bounded.
///
/// kMixedKernel:  phi(u(t)) <= c(t) + int_0^{alpha(t)} [f(t,s) eta(u) w(u)
///                + g(t,s) eta(u)] ds  — one retarded integral, g weights
///                eta alone.
/// kSplitKernel:  phi(u(t)) <= c(t) + int_0^{alpha(t)} f(t,s) eta(u) w(u) ds
///                + int_0^t g(t,s) eta(u) w(u) ds  — g gets its own
///                unretarded integral and weights eta*w.
enum class IneqForm { kMixedKernel, kSplitKernel };

struct ProblemInstance {
  ScalarFn phi, c, eta, w, alpha;
  Kernel f, g;
  std::optional<double> x0;  // transform base point; resolved at table build
  std::optional<double> x1;  // second transform base point, default 1
  IneqForm form = IneqForm::kMixedKernel;
  double t_max = 1.0;
};

/// Parses all model functions from expression strings (phi, eta, w over x;
/// c, alpha over t; f, g over (t, s)) and assembles an instance.
ProblemInstance make_problem(const std::string& phi, const std::string& c, const std::string& eta,
                             const std::string& w, const std::string& alpha, const std::string& f,
                             const std::string& g, IneqForm form, double t_max,
                             std::optional<double> x0 = std::nullopt,
                             std::optional<double> x1 = std::nullopt);

struct Violation {
  std::string hypothesis;
  double where = 0.0;      // worst violating sample point
  double magnitude = 0.0;  // how far the hypothesis is missed there
};

struct ValidationReport {
  bool pass = true;
  std::vector<Violation> violations;  // one entry per failed hypothesis
  std::vector<std::string> warnings;

  std::string str() const;
};

/// Samples every structural hypothesis the estimates rely on: phi strictly
/// increasing and growing past c(t_max); c positive nondecreasing; eta, w
/// nonnegative nondecreasing and positive away from 0; alpha nondecreasing
/// with 0 <= alpha(t) <= t; kernels nonnegative and nondecreasing in t.
/// Violations are reported, never thrown. A finite-looking transform
/// integral toward infinity is attached as a warning.
ValidationReport validate(const ProblemInstance& inst, std::size_t samples = 256);

}  // namespace ribound
