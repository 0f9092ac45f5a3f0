#include "ribound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

namespace ribound {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

struct TransformTables::Impl {
  Impl(const BuildOptions& o, ScalarFn p, ScalarFn e, ScalarFn ww)
      : opts(o), phi(std::move(p)), eta(std::move(e)), w(std::move(ww)) {}

  BuildOptions opts;
  ScalarFn phi, eta, w;
  double x0 = 0.0, x1 = 1.0;
  std::optional<numerics::TabulatedInverse> phi_inv_tab;
  std::optional<numerics::CumulativeIntegral> g_tab;
  std::optional<numerics::CumulativeIntegral> psi_tab;
  double psi_offset = 0.0;  // running-integral value at x1
  numerics::ImageProbe g_image, psi_image;
};

TransformTables TransformTables::build(const ProblemInstance& inst, const BuildOptions& opts) {
  auto impl = std::make_shared<Impl>(opts, inst.phi, inst.eta, inst.w);
  Impl* P = impl.get();

  const double c0 = inst.c(0.0);
  const double c_top = std::max(c0, inst.c(inst.t_max));
  if (!(c0 > 0.0)) throw DomainError("c(0) must be positive");

  P->phi_inv_tab.emplace([P](double x) { return P->phi(x); }, 1.0, opts.invert_tol,
                         opts.table_ratio);

  const auto h_G = [P](double s) { return 1.0 / P->eta((*P->phi_inv_tab)(s)); };

  const bool divergent = numerics::diverges_at_zero(h_G, opts.divergence_tol);
  if (inst.x0) {
    P->x0 = *inst.x0;
    if (!(P->x0 >= 0.0)) throw DomainError("x0 must be nonnegative");
    if (divergent && P->x0 == 0.0)
      throw DomainError("the first transform integral diverges at 0; x0 must be positive");
    if (!(P->x0 < c0)) throw DomainError("x0 = " + fmt(P->x0) + " must lie below c(0) = " + fmt(c0));
  } else {
    P->x0 = divergent ? 0.5 * c0 : 0.0;
  }
  P->x1 = inst.x1.value_or(1.0);
  if (!(P->x1 > 0.0)) throw DomainError("x1 must be positive");

  P->g_tab.emplace(h_G, P->x0, P->x0 + std::max(1.0, 2.0 * (c_top - P->x0)), opts.quad_tol,
                   opts.table_ratio);
  P->g_image = numerics::probe_image_sup([P](double x) { return P->g_tab->value(x); },
                                         std::max(1.0, 2.0 * P->x0));
  if (P->g_image.bounded && !(P->x1 < P->g_image.sup))
    throw DomainError("x1 = " + fmt(P->x1) + " is not below the supremum " + fmt(P->g_image.sup) +
                      " of the first transform");

  const auto h_Psi = [P](double s) {
    return 1.0 / P->w((*P->phi_inv_tab)(P->g_tab->inverse_fast(s)));
  };
  const double G_c0 = P->g_tab->value(c0);
  const double psi_lo = 0.5 * std::min(P->x1, G_c0);
  if (!(psi_lo > 0.0))
    throw DomainError("c(0) must exceed x0 so the second transform has room below its arguments");
  const double psi_hi = psi_lo + std::max(1.0, 2.0 * (std::max(P->x1, P->g_tab->value(c_top)) -
                                                      psi_lo));
  P->psi_tab.emplace(h_Psi, psi_lo, psi_hi, opts.quad_tol, opts.table_ratio);
  P->psi_offset = P->psi_tab->value(P->x1);

  // Image supremum of the second transform, probed in the substituted form
  //   sup Psi = int_{G_inv(x1)}^infty dx / (eta(phi_inv(x)) w(phi_inv(x))),
  // which avoids an inverse-table lookup per integrand sample.
  try {
    const double b0 = P->g_tab->inverse(P->x1);
    const auto h_q = [P](double x) {
      const double u = (*P->phi_inv_tab)(x);
      return 1.0 / (P->eta(u) * P->w(u));
    };
    numerics::CumulativeIntegral q(h_q, b0, b0 + std::max(1.0, b0), 1e-8, opts.table_ratio);
    P->psi_image = numerics::probe_image_sup([&q](double x) { return q.value(x); },
                                             std::max(1.0, 2.0 * b0));
  } catch (const Error&) {
    P->psi_image = numerics::probe_image_sup(
        [P](double x) { return P->psi_tab->value(x) - P->psi_offset; },
        std::max(1.0, 2.0 * P->x1));
  }
  return TransformTables(std::move(impl));
}

double TransformTables::G(double x) { return impl_->g_tab->value(x); }
double TransformTables::G_inv(double y) { return impl_->g_tab->inverse(y); }
double TransformTables::Psi(double x) { return impl_->psi_tab->value(x) - impl_->psi_offset; }
double TransformTables::Psi_inv(double y) { return impl_->psi_tab->inverse(y + impl_->psi_offset); }
double TransformTables::phi_inv(double s) { return (*impl_->phi_inv_tab)(s); }
const numerics::ImageProbe& TransformTables::psi_image() const { return impl_->psi_image; }
const numerics::ImageProbe& TransformTables::G_image() const { return impl_->g_image; }
double TransformTables::x0() const { return impl_->x0; }
double TransformTables::x1() const { return impl_->x1; }

double f_integral(const ProblemInstance& inst, double t, const BuildOptions& opts) {
  const double a = inst.alpha(t);
  if (a <= 0.0) return 0.0;
  return numerics::integrate([&](double s) { return inst.f(t, s); }, 0.0, a, opts.quad_tol);
}

namespace {

double g_integral_form(const ProblemInstance& inst, double t, IneqForm form,
                       const BuildOptions& opts) {
  const double up = (form == IneqForm::kMixedKernel) ? inst.alpha(t) : t;
  if (up <= 0.0) return 0.0;
  return numerics::integrate([&](double s) { return inst.g(t, s); }, 0.0, up, opts.quad_tol);
}

}  // namespace

double g_integral(const ProblemInstance& inst, double t, const BuildOptions& opts) {
  return g_integral_form(inst, t, inst.form, opts);
}

double p_eval(const ProblemInstance& inst, TransformTables& tables, double t,
              const BuildOptions& opts) {
  const double a = inst.alpha(t);
  double gi = 0.0;
  if (a > 0.0)
    gi = numerics::integrate([&](double s) { return inst.g(t, s); }, 0.0, a, opts.quad_tol);
  return tables.G(inst.c(t)) + gi;
}

namespace {

// argument handed to the outer inverse at time t; must stay below the image
// supremum of the second transform
double domain_argument(const ProblemInstance& inst, TransformTables& tables, double t,
                       IneqForm form, const BuildOptions& opts) {
  const double fv = f_integral(inst, t, opts);
  const double gv = g_integral_form(inst, t, form, opts);
  if (form == IneqForm::kMixedKernel) return tables.Psi(tables.G(inst.c(t)) + gv) + fv;
  return tables.Psi(tables.G(inst.c(t))) + fv + gv;
}

TauResult tau_for_form(const ProblemInstance& inst, TransformTables& tables, IneqForm form,
                       const TauSearch& search, const BuildOptions& opts) {
  const double horizon = std::min(inst.t_max, search.delta);
  if (!tables.psi_image().bounded) return {horizon, true};
  const double threshold = tables.psi_image().sup * (1.0 - search.safety_margin);
  const auto admissible = [&](double t) {
    try {
      return domain_argument(inst, tables, t, form, opts) < threshold;
    } catch (const Error&) {
      return false;
    }
  };
  if (!admissible(0.0))
    throw DomainError("domain predicate fails already at t = 0 (vacuous horizon)");
  if (admissible(horizon)) return {horizon, true};
  double lo = 0.0, hi = horizon;
  for (int iter = 0; iter < 200 && (hi - lo) > search.tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), false};
}

}  // namespace

TauResult compute_tau(const ProblemInstance& inst, TransformTables& tables,
                      const TauSearch& search, const BuildOptions& opts) {
  return tau_for_form(inst, tables, inst.form, search, opts);
}

namespace {

BoundCurve eval_curve(const ProblemInstance& inst, TransformTables& tables,
                      const numerics::Grid& grid, IneqForm form, const TauSearch& search,
                      const BuildOptions& opts) {
  const TauResult tr = tau_for_form(inst, tables, form, search, opts);
  BoundCurve curve{grid, {}, {}, tr.tau, tr.capped};
  curve.values.resize(grid.size());
  curve.in_domain.assign(grid.size(), false);
  const bool bounded = tables.psi_image().bounded;
  const double threshold =
      bounded ? tables.psi_image().sup * (1.0 - search.safety_margin)
              : std::numeric_limits<double>::infinity();
  const double marker = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    curve.values[i] = marker;
    try {
      const double fv = f_integral(inst, t, opts);
      const double gv = g_integral_form(inst, t, form, opts);
      if (fv == 0.0 && gv == 0.0) {
        // both integrals vanish: the whole transform chain cancels
        const double v = tables.phi_inv(inst.c(t));
        if (std::isfinite(v)) {
          curve.values[i] = v;
          curve.in_domain[i] = true;
        }
        continue;
      }
      const double arg = (form == IneqForm::kMixedKernel)
                             ? tables.Psi(tables.G(inst.c(t)) + gv) + fv
                             : tables.Psi(tables.G(inst.c(t))) + fv + gv;
      if (!(arg < threshold)) continue;
      const double v = tables.phi_inv(tables.G_inv(tables.Psi_inv(arg)));
      if (std::isfinite(v)) {
        curve.values[i] = v;
        curve.in_domain[i] = true;
      }
    } catch (const Error&) {
      // out of the transform domain at this node; marker already set
    }
  }
  return curve;
}

}  // namespace

BoundCurve bound_mixed_kernel(const ProblemInstance& inst, TransformTables& tables,
                              const numerics::Grid& grid, const TauSearch& search,
                              const BuildOptions& opts) {
  return eval_curve(inst, tables, grid, IneqForm::kMixedKernel, search, opts);
}

BoundCurve bound_split_kernel(const ProblemInstance& inst, TransformTables& tables,
                              const numerics::Grid& grid, const TauSearch& search,
                              const BuildOptions& opts) {
  return eval_curve(inst, tables, grid, IneqForm::kSplitKernel, search, opts);
}

BoundCurve evaluate_bound(const ProblemInstance& inst, TransformTables& tables,
                          const numerics::Grid& grid, const TauSearch& search,
                          const BuildOptions& opts) {
  return eval_curve(inst, tables, grid, inst.form, search, opts);
}

}  // namespace ribound
