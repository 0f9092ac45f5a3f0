#include "ribound/corollaries.hpp"

#include <algorithm>
#include <cmath>

namespace ribound {

namespace {

void check_power(const PowerCaseParams& p) {
  if (!(p.m > p.n && p.n > 0.0)) throw DomainError("power case needs m > n > 0");
  if (!(p.c > 0.0)) throw DomainError("power case needs c > 0");
}

double kernel_integral(const numerics::Fn1& k, double upper, double tol) {
  if (upper <= 0.0) return 0.0;
  return numerics::integrate(k, 0.0, upper, tol);
}

// Psi table for an integrand defined on (0, inf), with base point 1 and
// arguments never below `lowest_arg`.
numerics::CumulativeIntegral make_psi(const numerics::Fn1& h, double lowest_arg, double tol) {
  const double origin = 0.5 * std::min(1.0, lowest_arg);
  const double top = origin + std::max(1.0, 2.0 * (std::max(1.0, lowest_arg) - origin));
  return numerics::CumulativeIntegral(h, origin, top, tol);
}

}  // namespace

double power_case_G(double x, const PowerCaseParams& p) {
  check_power(p);
  if (!(x >= 0.0)) throw DomainError("power-case transform needs x >= 0");
  return std::pow(x, (p.m - p.n) / p.m);
}

double power_case_G_inv(double y, const PowerCaseParams& p) {
  check_power(p);
  if (!(y >= 0.0)) throw DomainError("power-case inverse needs y >= 0");
  return std::pow(y, p.m / (p.m - p.n));
}

namespace {

double power_case_bound(const PowerCaseParams& p, const numerics::Fn1& f, const numerics::Fn1& g,
                        const numerics::Fn1& w, const numerics::Fn1& alpha, double t, double tol,
                        bool g_retarded_inside) {
  check_power(p);
  if (!(t >= 0.0)) throw DomainError("t must be nonnegative");
  const double a = alpha(t);
  if (!(a >= 0.0 && a <= t)) throw DomainError("alpha(t) must lie in [0, t]");
  const double fi = kernel_integral(f, a, tol);
  const double gi = kernel_integral(g, g_retarded_inside ? a : t, tol);
  const double exponent = 1.0 / (p.m - p.n);
  const double base_arg = g_retarded_inside ? p.c + gi : p.c;
  const auto h = [&](double s) { return 1.0 / w(std::pow(s, exponent)); };
  auto psi = make_psi(h, std::min(1.0, base_arg), tol);
  const double target = psi.value(base_arg) + fi + (g_retarded_inside ? 0.0 : gi);
  return std::pow(psi.inverse(target), exponent);
}

}  // namespace

double power_case_bound_mixed(const PowerCaseParams& p, const numerics::Fn1& f,
                              const numerics::Fn1& g, const numerics::Fn1& w,
                              const numerics::Fn1& alpha, double t, double quad_tol) {
  return power_case_bound(p, f, g, w, alpha, t, quad_tol, true);
}

double power_case_bound_split(const PowerCaseParams& p, const numerics::Fn1& f,
                              const numerics::Fn1& g, const numerics::Fn1& w,
                              const numerics::Fn1& alpha, double t, double quad_tol) {
  return power_case_bound(p, f, g, w, alpha, t, quad_tol, false);
}

double log_case_G(double x, double x0) {
  if (!(x0 > 0.0)) throw DomainError("logarithmic case needs x0 > 0");
  if (!(x > 0.0)) throw DomainError("logarithmic transform needs x > 0");
  return std::log(std::log1p(x) / std::log1p(x0));
}

double log_case_G_inverse(double x, double x0, bool* overflowed) {
  if (!(x0 > 0.0)) throw DomainError("logarithmic case needs x0 > 0");
  if (overflowed) *overflowed = false;
  const double inner = std::exp(x) * std::log1p(x0);
  if (inner > 690.0) {  // e^inner would pass 1e300
    if (overflowed) *overflowed = true;
    return 1e300;
  }
  return std::expm1(inner);
}

double log_case_bound(double c, const numerics::Fn1& f, const numerics::Fn1& w,
                      const numerics::Fn1& alpha, double n, double x0, double t, double quad_tol) {
  if (!(n > 0.0)) throw DomainError("logarithmic case needs n > 0");
  if (!(x0 > 0.0 && c > x0)) throw DomainError("logarithmic case needs c > x0 > 0");
  if (!(t >= 0.0)) throw DomainError("t must be nonnegative");
  const double a = alpha(t);
  if (!(a >= 0.0 && a <= t)) throw DomainError("alpha(t) must lie in [0, t]");
  const double fi = kernel_integral(f, a, quad_tol);
  const double Gc = log_case_G(c, x0);
  const auto h = [&](double s) {
    return 1.0 / w(std::pow(log_case_G_inverse(s, x0), 1.0 / n));
  };
  auto psi = make_psi(h, Gc, quad_tol);
  const double target = psi.value(Gc) + fi;
  bool overflowed = false;
  const double inv = log_case_G_inverse(psi.inverse(target), x0, &overflowed);
  if (overflowed) throw DomainError("bound overflows in the logarithmic case");
  return std::pow(inv, 1.0 / n);
}

}  // namespace ribound
