#include "ribound/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "ribound/numerics.hpp"

namespace ribound {

namespace {

const std::vector<std::string> kVarX{"x"};
const std::vector<std::string> kVarT{"t"};
const std::vector<std::string> kVarTS{"t", "s"};

constexpr double kStrictSlack = 1e-12;

}  // namespace

ProblemInstance make_problem(const std::string& phi, const std::string& c, const std::string& eta,
                             const std::string& w, const std::string& alpha, const std::string& f,
                             const std::string& g, IneqForm form, double t_max,
                             std::optional<double> x0, std::optional<double> x1) {
  ProblemInstance inst{
      {Expr::parse(phi, kVarX), ScalarRole::kPhi},   {Expr::parse(c, kVarT), ScalarRole::kC},
      {Expr::parse(eta, kVarX), ScalarRole::kEta},   {Expr::parse(w, kVarX), ScalarRole::kW},
      {Expr::parse(alpha, kVarT), ScalarRole::kAlpha}, {Expr::parse(f, kVarTS), KernelRole::kF},
      {Expr::parse(g, kVarTS), KernelRole::kG},      x0,
      x1,                                            form,
      t_max};
  return inst;
}

namespace {

// keeps only the worst sample per hypothesis
class Collector {
 public:
  void record(const std::string& hypothesis, double where, double magnitude) {
    auto it = worst_.find(hypothesis);
    if (it == worst_.end() || magnitude > it->second.magnitude)
      worst_[hypothesis] = Violation{hypothesis, where, magnitude};
  }
  bool empty() const { return worst_.empty(); }
  std::vector<Violation> take() const {
    std::vector<Violation> out;
    out.reserve(worst_.size());
    for (const auto& [_, v] : worst_) out.push_back(v);
    return out;
  }

 private:
  std::map<std::string, Violation> worst_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string ValidationReport::str() const {
  std::string out = pass ? "validation: pass\n" : "validation: FAIL\n";
  for (const auto& v : violations)
    out += "  violated: " + v.hypothesis + " at " + fmt(v.where) + " (by " + fmt(v.magnitude) +
           ")\n";
  for (const auto& w : warnings) out += "  warning: " + w + "\n";
  return out;
}

ValidationReport validate(const ProblemInstance& inst, std::size_t samples) {
  if (samples < 2) samples = 2;
  Collector bad;
  ValidationReport report;

  auto guarded = [&bad](const char* name, double at, auto&& fn) -> std::optional<double> {
    try {
      const double v = fn();
      if (std::isfinite(v)) return v;
      bad.record(std::string("evaluable: ") + name, at, 0.0);
    } catch (const Error&) {
      bad.record(std::string("evaluable: ") + name, at, 0.0);
    }
    return std::nullopt;
  };

  std::vector<double> ts(samples);
  for (std::size_t i = 0; i < samples; ++i)
    ts[i] = inst.t_max * static_cast<double>(i) / static_cast<double>(samples - 1);

  // c: positive, nondecreasing
  double c_tmax = 1.0;
  {
    std::optional<double> prev;
    for (double t : ts) {
      const auto v = guarded("c", t, [&] { return inst.c(t); });
      if (!v) break;
      if (!(*v > 0.0)) bad.record("c positive", t, -*v);
      if (prev && *v < *prev - kStrictSlack * (1.0 + std::fabs(*prev)))
        bad.record("c nondecreasing", t, *prev - *v);
      prev = v;
      c_tmax = *v;
    }
  }

  // alpha: in [0, t], nondecreasing
  {
    std::optional<double> prev;
    for (double t : ts) {
      const auto v = guarded("alpha", t, [&] { return inst.alpha(t); });
      if (!v) break;
      if (*v < 0.0) bad.record("alpha nonnegative", t, -*v);
      if (*v > t) bad.record("alpha(t) <= t", t, *v - t);
      if (prev && *v < *prev - kStrictSlack * (1.0 + std::fabs(*prev)))
        bad.record("alpha nondecreasing", t, *prev - *v);
      prev = v;
    }
  }

  // phi: must keep increasing past c(t_max); find the value range to sample
  double x_hi = 1.0;
  {
    const double target = 2.0 * std::max(c_tmax, 1.0) + 1.0;
    try {
      const auto probe = numerics::probe_image_sup([&](double x) { return inst.phi(x); }, 1.0);
      if (probe.bounded && !probe.truncated && probe.sup <= c_tmax)
        bad.record("phi unbounded past c(t_max)", 0.0, c_tmax - probe.sup);
      for (const auto& [x, y] : probe.probe_points) {
        x_hi = x;
        if (y >= target) break;
      }
    } catch (const Error&) {
      bad.record("evaluable: phi", 1.0, 0.0);
    }
  }

  std::vector<double> xs(samples);
  for (std::size_t i = 0; i < samples; ++i)
    xs[i] = x_hi * static_cast<double>(i) / static_cast<double>(samples - 1);

  // phi strictly increasing on the value grid
  {
    std::optional<double> prev;
    for (double x : xs) {
      const auto v = guarded("phi", x, [&] { return inst.phi(x); });
      if (!v) break;
      if (prev) {
        const double need = kStrictSlack * (1.0 + std::fabs(*prev));
        if (*v - *prev <= need) bad.record("phi strictly increasing", x, need - (*v - *prev));
      }
      prev = v;
    }
  }

  // eta, w: nonnegative, nondecreasing, positive for x > 0
  for (const auto* sf : {&inst.eta, &inst.w}) {
    const char* name = (sf->role == ScalarRole::kEta) ? "eta" : "w";
    std::optional<double> prev;
    for (double x : xs) {
      const auto v = guarded(name, x, [&] { return (*sf)(x); });
      if (!v) break;
      if (*v < 0.0) bad.record(std::string(name) + " nonnegative", x, -*v);
      if (x > 0.0 && !(*v > 0.0)) bad.record(std::string(name) + " positive for x > 0", x, -*v);
      if (prev && *v < *prev - kStrictSlack * (1.0 + std::fabs(*prev)))
        bad.record(std::string(name) + " nondecreasing", x, *prev - *v);
      prev = v;
    }
  }

  // kernels: nonnegative everywhere, nondecreasing in t per fixed s
  {
    const std::size_t s_samples = 64;
    std::vector<double> ss(s_samples);
    for (std::size_t j = 0; j < s_samples; ++j)
      ss[j] = inst.t_max * static_cast<double>(j) / static_cast<double>(s_samples - 1);
    for (const auto* k : {&inst.f, &inst.g}) {
      const char* name = (k->role == KernelRole::kF) ? "f" : "g";
      for (double s : ss) {
        std::optional<double> prev;
        for (double t : ts) {
          const auto v = guarded(name, t, [&] { return (*k)(t, s); });
          if (!v) break;
          if (*v < 0.0) bad.record(std::string(name) + " nonnegative", t, -*v);
          if (prev && *v < *prev - kStrictSlack * (1.0 + std::fabs(*prev)))
            bad.record(std::string(name) + " nondecreasing in t", t, *prev - *v);
          prev = v;
        }
      }
    }
  }

  report.violations = bad.take();
  report.pass = report.violations.empty();

  // With the structure intact, probe whether the transform integral toward
  // infinity converges; a finite value bounds the domain of the first
  // inverse and is worth surfacing.
  if (report.pass) {
    const auto tail = [&](double v) {
      const double s = 1.0 / v;
      const double u = numerics::invert_monotone([&](double x) { return inst.phi(x); }, s, 0.0,
                                                 1e-8);
      return 1.0 / (inst.eta(u) * v * v);
    };
    try {
      if (!numerics::diverges_at_zero(tail, 1e-6))
        report.warnings.push_back(
            "the transform integral toward infinity looks finite; the first inverse has a "
            "bounded domain and the validity horizon may bind early");
    } catch (...) {
      // probe is best-effort only
    }
  }
  return report;
}

}  // namespace ribound
