#include "fraglab/planner.hpp"

#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "fraglab/error.hpp"

namespace fraglab {
namespace {

struct Interior {
  double r;
  double x;
  double value;
};

void check_inputs(const Technology& tech, const CostModel& cost, double kappa, const PlannerOptions& opts,
                  const CriticalPoint& cp) {
  if (tech.m < 2 || tech.n < 2) throw InvalidArgument("tech", "planner requires m >= 2 and n >= 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa", "must be finite and >= 0");
  if (opts.grid < 2) throw InvalidArgument("grid", "must be >= 2");
  if (!(opts.xbar >= 0.0 && opts.xbar < cp.x_crit)) throw InvalidArgument("xbar", "must lie in [0, x_crit)");
  cost.validate();
}

Interior best_interior(const Technology& tech, const CostModel& cost, double kappa, const PlannerOptions& opts,
                       const CriticalPoint& cp) {
  auto value = [&](double r) { return kappa * r - cost(chi(tech, r) - opts.xbar); };
  auto slope = [&](double r) {
    const double dchi = chi_derivative(tech, r);
    if (std::isinf(dchi)) return -std::numeric_limits<double>::infinity();
    return kappa - cost.derivative(chi(tech, r) - opts.xbar) * dchi;
  };
  const double r0 = cp.r_crit;
  const double h = (1.0 - r0) / opts.grid;
  int best = 0;
  double best_v = value(r0);
  for (int k = 1; k <= opts.grid; ++k) {
    const double v = value(k == opts.grid ? 1.0 : r0 + h * k);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  const double lo = r0 + h * std::max(0, best - 1);
  const double hi = best + 1 >= opts.grid ? 1.0 : r0 + h * (best + 1);
  double r_star;
  if (slope(lo) > 0.0 && slope(hi) < 0.0)
    r_star = detail::bisect(slope, lo, hi);
  else
    r_star = detail::golden_max(value, lo, hi, 1e-14);
  double v = value(r_star);
  if (best_v > v) {
    r_star = best == opts.grid ? 1.0 : r0 + h * best;
    v = best_v;
  }
  return {r_star, chi(tech, r_star), v};
}

}  // namespace

double planner_interior_value(const Technology& tech, const CostModel& cost, double kappa,
                              const PlannerOptions& opts) {
  const CriticalPoint cp = critical_point(tech);
  check_inputs(tech, cost, kappa, opts, cp);
  return best_interior(tech, cost, kappa, opts, cp).value;
}

PlannerSolution planner_solve(const Technology& tech, const CostModel& cost, double kappa,
                              const PlannerOptions& opts) {
  const CriticalPoint cp = critical_point(tech);
  check_inputs(tech, cost, kappa, opts, cp);
  PlannerSolution sol;
  sol.x_sp = opts.xbar;
  if (!cost.satisfies_inada())
    sol.warnings.push_back("cost " + cost.describe() + " violates the Inada condition; boundary x = 1 checked explicitly");
  const Interior in = best_interior(tech, cost, kappa, opts, cp);
  const double boundary = kappa - cost(1.0 - opts.xbar);
  Interior pick = in;
  if (boundary > in.value) pick = {1.0, 1.0, boundary};
  if (pick.value > 0.0) {
    sol.x_sp = pick.x;
    sol.r = pick.r;
    sol.value = pick.value;
    sol.interior = pick.r < 1.0;
  }
  return sol;
}

double kappa_crit_planner(const Technology& tech, const CostModel& cost, const PlannerOptions& opts) {
  const CriticalPoint cp = critical_point(tech);
  check_inputs(tech, cost, 0.0, opts, cp);
  auto surplus = [&](double kappa) { return best_interior(tech, cost, kappa, opts, cp).value; };
  double lo = 0.0, hi = 1.0;
  while (surplus(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw SolverError("kappa_crit_planner: no kappa with positive surplus");
  }
  return detail::bisect(surplus, lo, hi, 1e-8 * std::max(1.0, hi) * 0.01);
}

}  // namespace fraglab
