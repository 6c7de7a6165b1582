#include "fraglab/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail.hpp"
#include "fraglab/error.hpp"

namespace fraglab {
namespace {

// Pieces of chi_tau at r: u = (r - tau)/(1 - tau), s = u^{1/m},
// la = log(1 - s), one_minus_b = 1 - (1 - s)^{1/n}.
struct ChiParts {
  double log_u;
  double la;
  double one_minus_b;
};

ChiParts chi_parts(const Technology& t, double tau, double r) {
  const double u = (r - tau) / (1.0 - tau);
  const double log_u = std::log(u);
  const double s = std::exp(log_u / t.m);
  const double la = s < 0.5 ? std::log1p(-s) : std::log(-std::expm1(log_u / t.m));
  return {log_u, la, -std::expm1(la / t.n)};
}

double chi_general(const Technology& t, double tau, double r) {
  if (r >= 1.0) return 1.0;
  return chi_parts(t, tau, r).one_minus_b / r;
}

// r^2 times d chi_tau / d r. Its sign is the sign of the slope.
double chi_slope_numerator(const Technology& t, double tau, double r) {
  if (r >= 1.0) return t.n >= 2 ? std::numeric_limits<double>::infinity() : (1.0 / t.m - 1.0);
  const ChiParts p = chi_parts(t, tau, r);
  const double n = t.n, m = t.m;
  const double lead = std::exp(p.la * (1.0 / n - 1.0) + p.log_u * (1.0 / m - 1.0)) * r /
                      (n * m * (1.0 - tau));
  return lead - p.one_minus_b;
}

// Largest root of chi_tau(r) = x on the increasing branch of chi_tau, given
// an iterate `start` at or above it. Returns 0 when no such root exists.
double polish_on_branch(const Technology& t, double x, double tau, double start, double last_step) {
  auto g = [&](double r) { return chi_general(t, tau, r) - x; };
  double hi = std::min(1.0, start);
  double step = std::max(1e-13, 10.0 * std::abs(last_step));
  while (g(hi) < 0.0 && hi < 1.0) {
    hi = std::min(1.0, hi + step);
    step *= 2.0;
  }
  if (g(hi) == 0.0) return hi;

  const double lower_limit = tau + (1.0 - tau) * 1e-300;
  step = std::max(1e-13, 10.0 * std::abs(last_step));
  double lo = hi;
  double prev = hi;
  for (;;) {
    lo = std::max(lower_limit, prev - step);
    if (chi_slope_numerator(t, tau, lo) <= 0.0) {
      // Stepped past the minimum of chi; locate it and test its value.
      const double rmin = detail::bisect(
          [&](double r) { return chi_slope_numerator(t, tau, r); }, lo, prev);
      if (g(rmin) > 0.0) return 0.0;
      lo = rmin;
      break;
    }
    if (g(lo) <= 0.0) break;
    if (lo <= lower_limit) return 0.0;
    prev = lo;
    step *= 2.0;
  }
  return detail::bisect(g, lo, hi);
}

double largest_fixed_point(const Technology& t, double x, double tau, const FixedPointOptions& opts) {
  if (tau >= 1.0) return 1.0;
  if (x <= 0.0) return tau < opts.floor ? 0.0 : tau;
  double r = 1.0;
  double step = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double next = tau + (1.0 - tau) * reliability_map(t, x, r);
    step = r - next;
    r = next;
    if (r < opts.floor) return 0.0;
    if (std::abs(step) < opts.tol) break;
  }
  const double polished = polish_on_branch(t, x, tau, r, step);
  return polished < opts.floor ? 0.0 : polished;
}

void check_unit(const char* field, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(field, "must lie in [0, 1], got " + std::to_string(v));
}

}  // namespace

void validate(const Technology& tech) {
  if (tech.m < 1) throw InvalidArgument("m", "must be >= 1");
  if (tech.n < 1) throw InvalidArgument("n", "must be >= 1");
}

double reliability_map(const Technology& tech, double x, double r) {
  const double per_input = detail::one_minus_pow_complement(x * r, tech.n);
  return std::pow(per_input, tech.m);
}

double chi(const Technology& tech, double r) {
  validate(tech);
  if (!(r > 0.0)) throw InvalidArgument("r", "chi is undefined at r <= 0");
  if (r > 1.0) throw InvalidArgument("r", "must be <= 1");
  return chi_general(tech, 0.0, r);
}

double chi_derivative(const Technology& tech, double r) {
  if (!(r > 0.0) || r > 1.0) throw InvalidArgument("r", "must lie in (0, 1]");
  return chi_slope_numerator(tech, 0.0, r) / (r * r);
}

double chi_tau(const Technology& tech, double tau, double r) {
  validate(tech);
  check_unit("tau", tau);
  if (tau >= 1.0) throw InvalidArgument("tau", "chi_tau is undefined at tau = 1");
  if (!(r > tau) || r > 1.0) throw InvalidArgument("r", "must lie in (tau, 1]");
  return chi_general(tech, tau, r);
}

CriticalPoint critical_point(const Technology& tech) {
  validate(tech);
  if (tech.m < 2) throw InvalidArgument("m", "critical point requires m >= 2 (m = 1 has a continuous transition)");
  if (tech.n == 1) return {1.0, 1.0};
  auto slope = [&](double r) { return chi_slope_numerator(tech, 0.0, r); };
  constexpr int kGrid = 4096;
  double lo = 1e-12;
  double hi = 1.0;
  for (int k = 1; k <= kGrid; ++k) {
    const double r = static_cast<double>(k) / kGrid;
    if (slope(r) > 0.0) {
      hi = r;
      break;
    }
    lo = r;
  }
  const double r_crit = detail::bisect(slope, lo, hi);
  return {chi_general(tech, 0.0, r_crit), r_crit};
}

double simple_threshold(int n) {
  if (n < 1) throw InvalidArgument("n", "must be >= 1");
  return 1.0 / n;
}

double rho(const Technology& tech, double x, const FixedPointOptions& opts) {
  validate(tech);
  check_unit("x", x);
  return largest_fixed_point(tech, x, 0.0, opts);
}

double rho_truncated(const Technology& tech, double x, int tiers, const std::vector<Technology>& tier_overrides) {
  validate(tech);
  check_unit("x", x);
  if (tiers < 1) throw InvalidArgument("T", "must be >= 1");
  double r = 1.0;
  for (int t = 2; t <= tiers; ++t) {
    const std::size_t k = static_cast<std::size_t>(t - 2);
    const Technology& tt = k < tier_overrides.size() ? tier_overrides[k] : tech;
    validate(tt);
    r = reliability_map(tt, x, r);
  }
  return r;
}

double rho_tau(const Technology& tech, double x, double tau, const FixedPointOptions& opts) {
  validate(tech);
  check_unit("x", x);
  check_unit("tau", tau);
  return largest_fixed_point(tech, x, tau, opts);
}

double market_sourcing_prob(const Technology& tech, double x) {
  validate(tech);
  check_unit("x", x);
  return reliability_map(tech, x, 1.0);
}

}  // namespace fraglab
