#pragma once

#include "ribound/numerics.hpp"

namespace ribound {

/// Power-law specialization: phi(x) = x^m, eta(x) = (m/(m-n)) x^n with
/// m > n > 0, constant baseline c > 0 (measured in transform space, i.e.
/// the induced instance carries c(t) = c^{m/(m-n)}). The first transform
/// then closes to G(x) = x^{(m-n)/m} and the second to
/// Psi(x) = int_1^x ds / w(s^{1/(m-n)}).
struct PowerCaseParams {
  double m = 2.0;
  double n = 1.0;
  double c = 1.0;
};

double power_case_G(double x, const PowerCaseParams& p);
double power_case_G_inv(double y, const PowerCaseParams& p);

/// Closed-form bound for the mixed-kernel shape with one-variable kernels:
///   { Psi_inv[ Psi(c + int_0^{alpha(t)} g) + int_0^{alpha(t)} f ] }^{1/(m-n)}.
double power_case_bound_mixed(const PowerCaseParams& p, const numerics::Fn1& f,
                              const numerics::Fn1& g, const numerics::Fn1& w,
                              const numerics::Fn1& alpha, double t, double quad_tol = 1e-10);

/// Closed-form bound for the split-kernel shape:
///   { Psi_inv[ Psi(c) + int_0^{alpha(t)} f + int_0^t g ] }^{1/(m-n)}.
double power_case_bound_split(const PowerCaseParams& p, const numerics::Fn1& f,
                              const numerics::Fn1& g, const numerics::Fn1& w,
                              const numerics::Fn1& alpha, double t, double quad_tol = 1e-10);

/// Logarithmic specialization: phi(x) = x^n, eta(x) = (x^n + 1) ln(x^n + 1),
/// for which G(x) = ln( ln(x+1) / ln(x0+1) ) in transform space.
double log_case_G(double x, double x0);

/// Closed form e^(e^x ln(x0+1)) - 1. Values that would overflow are capped
/// at 1e300 with *overflowed set.
double log_case_G_inverse(double x, double x0, bool* overflowed = nullptr);

/// Bound for the logarithmic specialization (g absent by hypothesis):
///   { G_inv( Psi_inv[ Psi(G(c)) + int_0^{alpha(t)} f ] ) }^{1/n}
/// with the closed-form G/G_inv and Psi(x) = int_1^x ds / w(G_inv(s)^{1/n}).
double log_case_bound(double c, const numerics::Fn1& f, const numerics::Fn1& w,
                      const numerics::Fn1& alpha, double n, double x0, double t,
                      double quad_tol = 1e-10);

}  // namespace ribound
