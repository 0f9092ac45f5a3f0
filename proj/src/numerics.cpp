#include "ribound/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace ribound::numerics {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Adaptive Simpson with a width-proportional error budget. The leftmost
// chain may carry an integrable singularity (the only admissible one); when
// it reaches the depth cap the remaining mass is closed with a power-law
// tail fitted from the deepest samples.
struct AdaptiveSimpson {
  const Fn1& h;
  double tol;
  double a_orig, width, scale;
  double resolved = 0.0, unresolved = 0.0;
  static constexpr int kInteriorDepth = 52;
  static constexpr int kEdgeDepth = 44;

  double sample(double x) const {
    const double v = h(x);
    if (!std::isfinite(v))
      throw QuadratureError("non-finite integrand value at x = " + fmt(x));
    return v;
  }

  double close_left_tail(double a, double b, double flm, double fm, double fb, double fallback,
                         double err) {
    // fit h ~ C (x-a)^-p from the samples at a + w/4 and a + w/2
    if (flm > 0.0 && fm > 0.0 && fb > 0.0 && flm > fm) {
      const double p = std::log2(flm / fm);
      if (p > 0.02 && p < 0.98) {
        const double w = b - a;
        const double tail = fb * w / (1.0 - p);
        const double tail_alt = fm * w * std::exp2(-p) / (1.0 - p);
        unresolved += std::fabs(tail - tail_alt);
        return tail;
      }
      if (p >= 0.98) {
        // too close to non-integrable to trust a fit
        unresolved += std::fabs(fallback) + std::fabs(err);
        return fallback;
      }
    }
    unresolved += std::fabs(err);
    return fallback;
  }

  double run(double a, double b, double fa, double fm, double fb, double S, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    if (!(a < lm && lm < m && m < rm && rm < b)) return S;  // panel below double resolution
    const double flm = sample(lm), frm = sample(rm);
    const double Sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double Sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double S2 = Sl + Sr;
    const double err = (S2 - S) / 15.0;
    if (std::fabs(err) <= tol * scale * ((b - a) / width)) {
      resolved += std::fabs(err);
      return S2 + err;
    }
    const bool at_left_edge = (a == a_orig);
    const int cap = at_left_edge ? kEdgeDepth : kInteriorDepth;
    if (depth >= cap) {
      if (at_left_edge) return close_left_tail(a, b, flm, fm, fb, S2 + err, err);
      unresolved += std::fabs(err);
      return S2 + err;
    }
    return run(a, m, fa, flm, fm, Sl, depth + 1) + run(m, b, fm, frm, fb, Sr, depth + 1);
  }
};

}  // namespace

QuadResult integrate_adaptive(const Fn1& h, double a, double b, double tol) {
  if (!(a <= b)) throw std::invalid_argument("integration bounds out of order");
  if (a == b) return {0.0, 0.0, true};
  AdaptiveSimpson s{h, tol, a, b - a, 1.0};
  // never sample a (possibly singular) left endpoint exactly; the relative
  // offset can round away near large |a|, so fall back to the next double
  double a0 = a + 1e-14 * (b - a);
  if (a0 == a) a0 = std::nextafter(a, b);
  const double fa = s.sample(a0);
  const double fm = s.sample(0.5 * (a + b));
  const double fb = s.sample(b);
  const double S0 = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // error budget scale: |S0| alone explodes when the edge sample sits on a
  // singularity, so cap it with the edge-free midpoint estimate
  s.scale = 1.0 + std::min(std::fabs(S0), std::fabs((b - a) * fm));
  QuadResult r;
  r.value = s.run(a, b, fa, fm, fb, S0, 0);
  r.err_estimate = s.resolved + s.unresolved;
  r.converged = s.unresolved <= 8.0 * tol * (1.0 + std::fabs(r.value));
  return r;
}

double integrate(const Fn1& h, double a, double b, double tol) {
  const QuadResult r = integrate_adaptive(h, a, b, tol);
  if (!r.converged)
    throw QuadratureError("quadrature did not converge (error estimate " + fmt(r.err_estimate) +
                          " on [" + fmt(a) + ", " + fmt(b) + "])");
  return r.value;
}

std::vector<double> cumulative(const Fn1& h, const Grid& grid, double tol) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i)
    out[i] = out[i - 1] + integrate(h, grid[i - 1], grid[i], tol);
  return out;
}

double invert_monotone(const Fn1& F, double y, double x_lo, double tol) {
  const double ytol = tol * (1.0 + std::fabs(y));
  const double flo = F(x_lo);
  if (std::isfinite(flo)) {
    if (y < flo - ytol)
      throw DomainError("inversion target " + fmt(y) + " below F(x_lo) = " + fmt(flo));
    if (y <= flo) return x_lo;
  }
  // exponential bracket expansion; a non-finite sample is treated as above y
  double lo = x_lo, hi = x_lo;
  double step = 1e-3 * (1.0 + std::fabs(x_lo));
  double prev = flo;
  int stall = 0;
  bool bracketed = false;
  for (int iter = 0; iter < 1100; ++iter) {
    hi = x_lo + step;
    const double fhi = F(hi);
    if (!std::isfinite(fhi) || fhi >= y) {
      bracketed = true;
      break;
    }
    if (fhi - prev < 1e-13 * (1.0 + std::fabs(fhi))) {
      if (++stall >= 6 && fhi < y - ytol)
        throw DomainError("inversion target " + fmt(y) + " above the probed supremum " + fmt(fhi));
    } else {
      stall = 0;
    }
    prev = fhi;
    lo = hi;
    step *= 2.0;
    if (step > 1e290) break;
  }
  if (!bracketed)
    throw BracketError("bracket expansion exhausted while inverting toward " + fmt(y));
  for (int iter = 0; iter < 200 && (hi - lo) > 0.5e-12 * (2.0 + std::fabs(lo) + std::fabs(hi));
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = F(mid);
    if (std::isfinite(fmid) && fmid < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ImageProbe probe_image_sup(const Fn1& F, double x_start) {
  if (!(x_start > 0.0) || !std::isfinite(x_start))
    throw std::invalid_argument("probe start must be positive and finite");
  ImageProbe probe;
  for (int k = 0; k <= 60; ++k) {
    const double x = x_start * std::exp2(k);
    if (!std::isfinite(x)) {
      probe.truncated = true;
      break;
    }
    double v;
    try {
      v = F(x);
    } catch (...) {
      v = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(v)) {
      probe.truncated = true;
      break;
    }
    probe.probe_points.emplace_back(x, v);
  }
  const auto& pts = probe.probe_points;
  if (probe.truncated) {
    probe.bounded = true;
    probe.sup = pts.empty() ? std::numeric_limits<double>::quiet_NaN() : pts.back().second;
    return probe;
  }
  if (pts.size() >= 6) {
    bool flat = true;
    for (std::size_t i = pts.size() - 5; i < pts.size(); ++i) {
      const double inc = std::max(0.0, pts[i].second - pts[i - 1].second);
      if (inc >= 1e-12 * (1.0 + std::fabs(pts[i].second))) {
        flat = false;
        break;
      }
    }
    if (flat) {
      probe.bounded = true;
      const double last_inc = std::max(0.0, pts.back().second - pts[pts.size() - 2].second);
      probe.sup = pts.back().second + last_inc;
      return probe;
    }
  }
  probe.bounded = false;
  probe.sup = std::numeric_limits<double>::infinity();
  return probe;
}

bool diverges_at_zero(const Fn1& h, double tol) {
  try {
    double total = integrate_adaptive(h, 1.0 / 16.0, 1.0, 1e-8).value;
    if (!std::isfinite(total)) return true;
    for (int k = 4; k < 40; ++k) {
      const double inc = integrate_adaptive(h, std::exp2(-(k + 1)), std::exp2(-k), 1e-8).value;
      if (!std::isfinite(inc) || inc < 0.0) return true;
      if (inc < tol * (1.0 + total)) return false;
      total += inc;
    }
  } catch (...) {
    return true;  // inconclusive probes are treated as divergent
  }
  return true;
}

// ---------------------------------------------------------------------------

Grid::Grid(std::vector<double> ns) : nodes(std::move(ns)) {
  if (nodes.empty() || nodes.front() != 0.0)
    throw std::invalid_argument("grid must start at 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]) || !std::isfinite(nodes[i]))
      throw std::invalid_argument("grid nodes must be finite and strictly increasing");
}

Grid Grid::uniform(double t_end, std::size_t n) {
  if (!(t_end > 0.0) || n < 2) throw std::invalid_argument("bad uniform grid request");
  std::vector<double> ns(n);
  for (std::size_t i = 0; i < n; ++i)
    ns[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
  ns.back() = t_end;
  return Grid(std::move(ns));
}

double Grid::spacing_near(std::size_t i) const {
  if (nodes.size() < 2) return 0.0;
  const std::size_t j = std::min(i, nodes.size() - 2);
  return nodes[j + 1] - nodes[j];
}

// ---------------------------------------------------------------------------

namespace {

// derivative at x_t of the polynomial through (xs[lo..lo+cnt), ys[...])
double lagrange_derivative(const std::vector<double>& xs, const std::vector<double>& ys,
                           std::size_t lo, std::size_t cnt, double x_t) {
  double total = 0.0;
  for (std::size_t j = lo; j < lo + cnt; ++j) {
    double denom = 1.0;
    for (std::size_t l = lo; l < lo + cnt; ++l)
      if (l != j) denom *= xs[j] - xs[l];
    double dsum = 0.0;
    for (std::size_t k = lo; k < lo + cnt; ++k) {
      if (k == j) continue;
      double prod = 1.0;
      for (std::size_t l = lo; l < lo + cnt; ++l)
        if (l != j && l != k) prod *= x_t - xs[l];
      dsum += prod;
    }
    total += ys[j] * dsum / denom;
  }
  return total;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
    : x_(std::move(xs)), y_(std::move(ys)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("interpolant needs >= 2 nodes");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("interpolation nodes must increase");
    if (y_[i] < y_[i - 1]) throw std::invalid_argument("interpolation data must be nondecreasing");
  }
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  m_.assign(n, 0.0);
  if (n == 2) {
    m_[0] = m_[1] = d[0];
  } else {
    const std::size_t cnt = std::min<std::size_t>(4, n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = (i >= 1) ? i - 1 : 0;
      lo = std::min(lo, n - cnt);
      m_[i] = lagrange_derivative(x_, y_, lo, cnt, x_[i]);
    }
  }
  // limit slopes so every panel stays monotone
  for (std::size_t i = 0; i < n; ++i) {
    const double dl = (i > 0) ? d[i - 1] : d[0];
    const double dr = (i + 1 < n) ? d[i] : d[n - 2];
    const double cap = 3.0 * std::min(dl, dr);
    m_[i] = std::clamp(m_[i], 0.0, cap);
  }
}

double MonotoneCubic::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const std::size_t k =
      static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  const double hk = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / hk;
  const double omt = 1.0 - t;
  const double h00 = (1.0 + 2.0 * t) * omt * omt;
  const double h10 = t * omt * omt;
  const double h01 = t * t * (3.0 - 2.0 * t);
  const double h11 = t * t * (t - 1.0);
  return y_[k] * h00 + hk * m_[k] * h10 + y_[k + 1] * h01 + hk * m_[k + 1] * h11;
}

double MonotoneCubic::inverse(double y) const {
  if (y <= y_.front()) return x_.front();
  if (y >= y_.back()) return x_.back();
  const std::size_t k =
      static_cast<std::size_t>(std::upper_bound(y_.begin(), y_.end(), y) - y_.begin()) - 1;
  double lo = x_[k], hi = x_[k + 1];
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * (1.0 + std::fabs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

CumulativeIntegral::CumulativeIntegral(Fn1 h, double origin, double initial_top, double quad_tol,
                                       double ratio)
    : h_(std::move(h)), origin_(origin), ratio_(ratio), tol_(quad_tol) {
  if (!(initial_top > origin)) throw std::invalid_argument("table top must exceed its origin");
  const double span = initial_top - origin;
  // steep integrands near the origin get a deep geometric layout
  bool deep = true;
  try {
    const double ha = h_(origin + span * 1e-12);
    const double hb = h_(origin + span * 1e-3);
    deep = !(std::isfinite(ha) && std::isfinite(hb) && std::fabs(ha) <= 1e3 * (std::fabs(hb) + 1.0));
  } catch (...) {
    deep = true;
  }
  step_ = deep ? span * std::exp2(-40) : span / 512.0;
  xs_.push_back(origin);
  vs_.push_back(0.0);
  append_to(initial_top);
}

void CumulativeIntegral::append_to(double x_target) {
  if (x_target > 1e250) throw DomainError("table extension limit reached");
  bool changed = false;
  try {
    while (xs_.back() < x_target) {
      double next = xs_.back() + step_;
      if (next <= xs_.back()) throw DomainError("table panel width underflow");
      const QuadResult r = integrate_adaptive(h_, xs_.back(), next, tol_ * 0.01);
      if (!r.converged) unresolved_ += r.err_estimate;
      xs_.push_back(next);
      vs_.push_back(vs_.back() + r.value);
      step_ = (next - origin_) * (ratio_ - 1.0);
      changed = true;
    }
  } catch (...) {
    if (changed) rebuild();  // keep the interpolant in sync with what landed
    throw;
  }
  if (changed) rebuild();
}

void CumulativeIntegral::rebuild() {
  interp_ = MonotoneCubic(xs_, vs_);
  inv_count_ = 1;
  while (inv_count_ < vs_.size() && vs_[inv_count_] > vs_[inv_count_ - 1]) ++inv_count_;
  if (inv_count_ >= 2)
    inv_interp_ = MonotoneCubic(std::vector<double>(vs_.begin(), vs_.begin() + inv_count_),
                                std::vector<double>(xs_.begin(), xs_.begin() + inv_count_));
}

double CumulativeIntegral::value(double x) {
  if (x < origin_) {
    if (x < origin_ - 1e-9 * (1.0 + std::fabs(origin_)))
      throw DomainError("evaluation below the table origin");
    x = origin_;
  }
  if (x > xs_.back()) {
    // extend in span-doubling batches so repeated small overshoots do not
    // trigger an interpolant rebuild per call
    const double batched = origin_ + 2.0 * (xs_.back() - origin_);
    const double eff = std::max(x, std::min(batched, 1e249));
    if (eff > x) {
      try {
        append_to(eff);
      } catch (...) {
        if (xs_.back() < x) append_to(x);  // overshoot failed; cover the request exactly
      }
    } else {
      append_to(x);
    }
  }
  return interp_(x);
}

void CumulativeIntegral::extend_for_value(double y) {
  int rounds = 0;
  while (vs_.back() < y) {
    const double old_top = vs_.back();
    append_to(origin_ + 2.0 * (xs_.back() - origin_));
    if (vs_.back() - old_top < 1e-13 * (1.0 + std::fabs(vs_.back())))
      throw DomainError("inverse target " + fmt(y) + " above the supremum " + fmt(vs_.back()));
    if (++rounds > 2000) throw DomainError("table inversion exhausted its extension budget");
  }
}

double CumulativeIntegral::inverse(double y) {
  if (y < 0.0) throw DomainError("inverse of a negative cumulative value");
  if (y == 0.0) return origin_;
  extend_for_value(y);
  return interp_.inverse(y);
}

double CumulativeIntegral::inverse_fast(double y) {
  if (y < 0.0) throw DomainError("inverse of a negative cumulative value");
  if (y == 0.0) return origin_;
  extend_for_value(y);
  if (inv_count_ < 2 || y > vs_[inv_count_ - 1]) return interp_.inverse(y);
  return inv_interp_(y);
}

// ---------------------------------------------------------------------------

TabulatedInverse::TabulatedInverse(Fn1 F, double initial_top, double tol, double ratio)
    : F_(std::move(F)), tol_(tol), ratio_(ratio) {
  if (!(initial_top > 0.0)) throw std::invalid_argument("inverse table top must be positive");
  x_.push_back(0.0);
  s_.push_back(F_(0.0));
  double u = initial_top * std::exp2(-40);
  while (x_.back() < initial_top) {
    const double v = F_(u);
    if (!std::isfinite(v)) break;
    if (v > s_.back()) {
      x_.push_back(u);
      s_.push_back(v);
    }
    u *= ratio_;
  }
  if (x_.size() < 2) throw std::invalid_argument("function not increasing on the table range");
  rebuild();
}

void TabulatedInverse::rebuild() { interp_ = MonotoneCubic(s_, x_); }

void TabulatedInverse::extend_to(double s_target) {
  const double batched = std::max(s_target, 2.0 * s_.back());  // amortize rebuilds
  bool changed = false;
  double u = x_.back();
  while (s_.back() < batched) {
    u *= ratio_;
    if (u > 1e250) {
      if (changed) rebuild();
      if (s_.back() >= s_target) return;
      throw DomainError("inverse table extension limit reached");
    }
    const double v = F_(u);
    if (!std::isfinite(v)) {
      if (changed) rebuild();
      if (s_.back() >= s_target) return;
      throw DomainError("function overflowed before reaching " + fmt(s_target));
    }
    if (v > s_.back()) {
      x_.push_back(u);
      s_.push_back(v);
      changed = true;
    }
  }
  if (changed) rebuild();
}

double TabulatedInverse::operator()(double s) {
  if (s <= s_.front()) return 0.0;
  if (s > s_.back()) extend_to(s);
  return interp_(s);
}

}  // namespace ribound::numerics
