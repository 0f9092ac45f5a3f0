#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "ribound/errors.hpp"

namespace ribound::numerics {

using Fn1 = std::function<double(double)>;

/// Strictly increasing evaluation nodes starting at 0.
struct Grid {
  std::vector<double> nodes;

  static Grid uniform(double t_end, std::size_t n);
  Grid() = default;
  explicit Grid(std::vector<double> nodes);

  std::size_t size() const { return nodes.size(); }
  double operator[](std::size_t i) const { return nodes[i]; }
  double back() const { return nodes.back(); }
  double spacing_near(std::size_t i) const;
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;  // accumulated local error estimates
  bool converged = true;      // false when the refinement budget was exhausted
};

/// Adaptive Simpson estimate of the integral of h over [a, b] with mixed
/// tolerance |error| <= tol * (1 + |result|). The integrand is never
/// evaluated exactly at a: the leftmost sample sits at a + 1e-14*(b-a), so
/// integrable singularities at the left endpoint are admissible. Where the
/// recursion depth cap is hit on the leftmost panel chain, the remaining
/// mass is closed with a fitted power-law tail. Throws QuadratureError on a
/// non-finite integrand value and std::invalid_argument when a > b.
QuadResult integrate_adaptive(const Fn1& h, double a, double b, double tol = 1e-10);

/// Value of integrate_adaptive; throws QuadratureError when not converged.
double integrate(const Fn1& h, double a, double b, double tol = 1e-10);

/// Running integral of h from 0 to each grid node; result[0] = 0 and panels
/// are accumulated additively so refining the grid never changes earlier
/// panel sums by more than their quadrature error.
std::vector<double> cumulative(const Fn1& h, const Grid& grid, double tol = 1e-10);

/// Solves F(x) = y for a continuous nondecreasing F, searching [x_lo, inf).
/// Exponential bracket expansion from x_lo, then bisection to relative width
/// 1e-12. Throws DomainError when y lies below F(x_lo) or above the probed
/// supremum of F, BracketError when expansion runs out of range.
double invert_monotone(const Fn1& F, double y, double x_lo, double tol = 1e-10);

struct ImageProbe {
  double sup = std::numeric_limits<double>::infinity();
  bool bounded = false;
  bool truncated = false;  // probe hit a non-finite value; sup is a floor
  std::vector<std::pair<double, double>> probe_points;
};

/// Estimates sup F over [x_start, inf) for nondecreasing F by sampling at
/// x_start * 2^k, k = 0..60. Classified bounded when the last 5 increments
/// are each below 1e-12 * (1 + |F|); then sup = last value + last increment
/// as a conservative cap. A non-finite sample stops the scan and classifies
/// bounded at the last finite value with `truncated` set.
ImageProbe probe_image_sup(const Fn1& F, double x_start);

/// Probes whether the integral of h over (0, x] diverges at 0 by integrating
/// from eps_k = 2^-k, k = 4..40. Returns true when the increments never
/// shrink below tol * (1 + total); inconclusive probes (including integrand
/// failures) return true.
bool diverges_at_zero(const Fn1& h, double tol = 1e-6);

/// Piecewise cubic Hermite interpolant of nondecreasing data. Slopes come
/// from a local cubic fit and are then limited to keep the interpolant
/// monotone. Evaluation clamps outside the node range.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;
  /// Preimage of y under the interpolant (requires increasing data); clamps
  /// to the end nodes when y lies outside the tabulated value range.
  double inverse(double y) const;

  std::size_t size() const { return x_.size(); }
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  double y_front() const { return y_.front(); }
  double y_back() const { return y_.back(); }

 private:
  std::vector<double> x_, y_, m_;
};

/// Lazily extended table of the running integral V(x) = int_origin^x h, with
/// anchors laid out geometrically and monotone cubic interpolation between
/// them. Supports extension past the initial top by continued geometric
/// growth, and inversion with detection of a finite supremum.
class CumulativeIntegral {
 public:
  CumulativeIntegral(Fn1 h, double origin, double initial_top, double quad_tol = 1e-10,
                     double ratio = 1.01);

  double value(double x);
  double inverse(double y);  // y >= 0; DomainError above the supremum
  /// Interpolates the swapped (value, x) table directly instead of
  /// bisecting; an order of magnitude faster, accurate to the shared
  /// interpolation budget. Meant for use inside integrands.
  double inverse_fast(double y);
  double origin() const { return origin_; }
  double top_x() const { return xs_.back(); }
  double top_value() const { return vs_.back(); }
  double unresolved() const { return unresolved_; }

 private:
  void append_to(double x_target);
  void extend_for_value(double y);
  void rebuild();

  Fn1 h_;
  double origin_, ratio_, tol_;
  double step_;  // width of the next panel to append
  std::vector<double> xs_, vs_;
  MonotoneCubic interp_, inv_interp_;
  std::size_t inv_count_ = 0;  // strictly increasing prefix backing inv_interp_
  double unresolved_ = 0.0;
};

/// Lazily extended tabulation of the inverse of a strictly increasing F on
/// [0, inf), interpolated monotonically in value space.
class TabulatedInverse {
 public:
  TabulatedInverse(Fn1 F, double initial_top, double tol = 1e-10, double ratio = 1.01);

  double operator()(double s);  // clamps to 0 for s <= F(0)

 private:
  void extend_to(double s_target);
  void rebuild();

  Fn1 F_;
  double tol_, ratio_;
  std::vector<double> x_, s_;
  MonotoneCubic interp_;
};

}  // namespace ribound::numerics
