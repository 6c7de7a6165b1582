#include "fraglab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail.hpp"
#include "fraglab/error.hpp"

namespace fraglab {

// ---------------------------------------------------------------- models

GrossProfitModel GrossProfitModel::linear(double kappa, double a, double b) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa", "must be positive");
  if (!(a > 0.0)) throw InvalidArgument("profit.a", "must be positive");
  if (!(b > 0.0)) throw InvalidArgument("profit.b", "must be positive");
  GrossProfitModel m;
  m.family_ = Family::Linear;
  m.kappa_ = kappa;
  m.a_ = a;
  m.b_ = b;
  return m;
}

GrossProfitModel GrossProfitModel::ces(double kappa, double sigma, double lambda, double iota, int n) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa", "must be positive");
  if (!(sigma > 1.0)) throw InvalidArgument("profit.sigma", "must exceed 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("profit.lambda", "must lie in (0, 1)");
  if (!(iota > 0.0 && iota < 1.0)) throw InvalidArgument("profit.iota", "must lie in (0, 1)");
  if (n < 1) throw InvalidArgument("profit.n", "must be >= 1");
  GrossProfitModel m;
  m.family_ = Family::Ces;
  m.kappa_ = kappa;
  m.sigma_ = sigma;
  m.lambda_ = lambda;
  m.iota_ = iota;
  m.n_ = n;
  return m;
}

double GrossProfitModel::g(double q) const {
  if (family_ == Family::Linear) return a_ * (1.0 - b_ * q);
  const double gamma = (1.0 - iota_) * (1.0 - iota_) / (lambda_ * (2.0 - iota_));
  if (q <= 0.0) return std::numeric_limits<double>::infinity();
  return gamma / (n_ * (sigma_ - 1.0) * q);
}

double GrossProfitModel::g_inverse(double v) const {
  if (family_ == Family::Linear) {
    if (v >= a_) return 0.0;
    return (1.0 - v / a_) / b_;
  }
  if (v <= 0.0) return std::numeric_limits<double>::infinity();
  const double gamma = (1.0 - iota_) * (1.0 - iota_) / (lambda_ * (2.0 - iota_));
  return gamma / (n_ * (sigma_ - 1.0) * v);
}

GrossProfitModel GrossProfitModel::with_kappa(double kappa) const {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa", "must be positive");
  GrossProfitModel m = *this;
  m.kappa_ = kappa;
  return m;
}

double EntryModel::operator()(double f) const { return intercept + beta * std::pow(std::max(f, 0.0), p); }

double EntryModel::inverse(double v) const {
  if (v <= intercept) return 0.0;
  return std::pow((v - intercept) / beta, 1.0 / p);
}

MarketPrimitives MarketPrimitives::with_kappa(double kappa) const {
  MarketPrimitives out = *this;
  out.profit = profit.with_kappa(kappa);
  return out;
}

MarketPrimitives MarketPrimitives::with_xbar(double xb) const {
  MarketPrimitives out = *this;
  out.xbar = xb;
  return out;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Unproductive: return "Unproductive";
    case Regime::Critical: return "Critical";
    case Regime::Noncritical: return "Noncritical";
  }
  return "?";
}

std::string to_string(ShockMode m) {
  return m == ShockMode::FixedInvestment ? "FixedInvestment" : "ReoptimizedInvestment";
}

std::string to_string(Fragility f) { return f == Fragility::Fragile ? "Fragile" : "Robust"; }

// ---------------------------------------------------------------- solvers

namespace {

struct Ctx {
  const MarketPrimitives& p;
  CriticalPoint cp;
};

void check_solver_inputs(const MarketPrimitives& p) {
  validate(p.tech);
  if (p.tech.m < 2) throw InvalidArgument("m", "equilibrium solvers require m >= 2");
  if (p.tech.n < 2) throw InvalidArgument("n", "equilibrium solvers require n >= 2");
  if (!(p.entry.beta > 0.0) || !(p.entry.p > 0.0)) throw InvalidArgument("entry", "beta and p must be positive");
}

Ctx make_ctx(const MarketPrimitives& p) {
  check_solver_inputs(p);
  Ctx c{p, critical_point(p.tech)};
  if (!(p.xbar < c.cp.x_crit)) throw InvalidArgument("xbar", "must be below x_crit");
  return c;
}

// m n r^{2 - 1/m} (1 - r^{1/m})^{1 - 1/n}: marginal functionality at a
// symmetric fixed point, divided by G.
double strength_factor(const Technology& t, double r) {
  if (r <= 0.0) return 0.0;
  const double m = t.m, n = t.n;
  const double lr = std::log(r);
  const double a = -std::expm1(lr / m);
  const double tail = a > 0.0 ? std::exp((1.0 - 1.0 / n) * std::log(a)) : (t.n == 1 ? 1.0 : 0.0);
  return m * n * std::exp((2.0 - 1.0 / m) * lr) * tail;
}

double oi_gap(const Ctx& c, double fbar, double r) {
  const double G = c.p.profit.G(r * fbar);
  return G * strength_factor(c.p.tech, r) - c.p.cost.derivative(chi(c.p.tech, r) - c.p.xbar);
}

double firm_profit(const MarketPrimitives& p, double G, double x_if, double r) {
  return G * functionality_prob(x_if, r, p.tech) - p.cost(x_if - p.xbar);
}

bool best_response_ok(const Ctx& c, double fbar, double x_star, double r, int grid) {
  const double G = c.p.profit.G(r * fbar);
  const double target = firm_profit(c.p, G, x_star, r);
  const double lo = std::max(0.0, c.p.xbar);
  const double slack = 1e-10 * (1.0 + std::abs(target));
  for (int k = 0; k <= grid; ++k) {
    const double x = lo + (1.0 - lo) * k / grid;
    if (firm_profit(c.p, G, x, r) > target + slack) return false;
  }
  return true;
}

InvestmentEquilibrium solve_investment(const Ctx& c, double fbar, const InvestmentOptions& opts) {
  InvestmentEquilibrium out;
  out.fbar = fbar;
  out.x_star = c.p.xbar;
  const double r0 = c.cp.r_crit;
  const int K = std::max(2, opts.scan);
  std::vector<double> rs(K + 1), gaps(K + 1);
  for (int k = 0; k <= K; ++k) {
    rs[k] = k == K ? 1.0 : r0 + (1.0 - r0) * k / K;
    gaps[k] = oi_gap(c, fbar, rs[k]);
  }
  std::vector<double> roots;
  if (gaps[0] == 0.0) roots.push_back(r0);
  for (int k = 0; k < K; ++k) {
    const bool a = gaps[k] > 0.0, b = gaps[k + 1] > 0.0;
    if (a != b && gaps[k + 1] != 0.0)
      roots.push_back(detail::bisect([&](double r) { return oi_gap(c, fbar, r); }, rs[k], rs[k + 1]));
  }
  out.roots = static_cast<int>(roots.size());
  std::sort(roots.begin(), roots.end(), std::greater<>());
  for (double r : roots) {
    const double x = chi(c.p.tech, r);
    if (best_response_ok(c, fbar, x, r, opts.verify_grid)) {
      out.x_star = x;
      out.r = r;
      out.positive = true;
      return out;
    }
    out.rejected_candidate = true;
  }
  return out;
}

std::optional<double> f_crit_raw(const Ctx& c) {
  const double r0 = c.cp.r_crit;
  const double need = c.p.cost.derivative(c.cp.x_crit - c.p.xbar) / strength_factor(c.p.tech, r0);
  const double v = need / c.p.profit.kappa();
  const double g0 = c.p.profit.g0();
  double q;
  if (v > g0) {
    if (v > g0 * (1.0 + 1e-12)) return std::nullopt;
    q = 0.0;
  } else {
    q = c.p.profit.g_inverse(v);
  }
  return q / r0;
}

double H_at(const Ctx& c, double fbar, const InvestmentOptions& opts) {
  const InvestmentEquilibrium inv = solve_investment(c, fbar, opts);
  if (!inv.positive) return c.p.entry.inverse(0.0);
  const double gross = c.p.profit.G(fbar * inv.r) * inv.r - c.p.cost(inv.x_star - c.p.xbar);
  return c.p.entry.inverse(std::max(gross, 0.0));
}

// Largest stable solution of the investment condition (gap crossing from
// positive to negative) at or below r_from, or 0 if there is none above r_crit.
double stable_root_below(const Ctx& c, double fbar, double r_from) {
  const double r0 = c.cp.r_crit;
  auto gap = [&](double r) { return oi_gap(c, fbar, r); };
  if (r_from <= r0) return 0.0;
  if (gap(r_from) >= 0.0) return r_from;
  double prev = r_from;
  for (double d = 1e-12 * r_from; prev > r0; d *= 2.0) {
    const double r = std::max(r0, r_from - d);
    if (gap(r) > 0.0) return detail::bisect(gap, r, prev);
    prev = r;
  }
  constexpr int kScan = 2048;
  for (int k = kScan - 1; k >= 0; --k) {
    const double r = r0 + (r_from - r0) * k / kScan;
    if (gap(r) > 0.0) {
      const double hi = r0 + (r_from - r0) * (k + 1) / kScan;
      return detail::bisect(gap, r, hi);
    }
  }
  return 0.0;
}

// Literal threshold formula, m n rho_c (1 - x_c rho_c)^{n-1} (1 - (1 - x_c rho_c)^n)^{m-1}.
double threshold_denominator(const Ctx& c) {
  const double m = c.p.tech.m, n = c.p.tech.n;
  const double u = c.cp.x_crit * c.cp.r_crit;
  return m * n * c.cp.r_crit * std::pow(1.0 - u, n - 1.0) *
         std::pow(detail::one_minus_pow_complement(u, n), m - 1.0);
}

}  // namespace

double functionality_prob(double x_if, double r, const Technology& tech) {
  return reliability_map(tech, x_if, r);
}

double marginal_benefit(double x_if, double r, double fbar, const MarketPrimitives& prim) {
  if (r <= 0.0) return 0.0;
  const double m = prim.tech.m, n = prim.tech.n;
  const double u = std::clamp(x_if * r, 0.0, 1.0);
  const double G = prim.profit.G(r * fbar);
  return G * r * n * std::pow(1.0 - u, n - 1.0) * m *
         std::pow(detail::one_minus_pow_complement(u, n), m - 1.0);
}

InvestmentDiagnostics investment_diagnostics(double x, const MarketPrimitives& prim) {
  const Ctx c = make_ctx(prim);
  if (x < c.cp.x_crit - 1e-14) throw InvalidArgument("x", "must be >= x_crit (rho vanishes below it)");
  const double r = x <= c.cp.x_crit + 1e-14 ? c.cp.r_crit : rho(prim.tech, x);
  const double m = prim.tech.m, n = prim.tech.n;

  // q(u) = m n v^{n-1} w^{m-1} with v = 1 - u, w = 1 - v^n, and Q(x_if) = r q(x_if r).
  auto q = [&](double u) {
    const double v = 1.0 - u, w = 1.0 - std::pow(v, n);
    return m * n * std::pow(v, n - 1.0) * std::pow(w, m - 1.0);
  };
  auto q2 = [&](double u) {
    const double v = 1.0 - u, w = 1.0 - std::pow(v, n);
    const double K = (m * n - 1.0) * std::pow(v, n) - (n - 1.0);
    double d = std::pow(v, n - 2.0) * std::pow(w, m - 2.0) * (m * n - 1.0) * n * std::pow(v, n - 1.0);
    if (n != 2.0) d += (n - 2.0) * std::pow(v, n - 3.0) * std::pow(w, m - 2.0) * K;
    if (m != 2.0) d -= std::pow(v, n - 2.0) * (m - 2.0) * std::pow(w, m - 3.0) * n * std::pow(v, n - 1.0) * K;
    return -m * n * d;
  };

  InvestmentDiagnostics d;
  const double u2 = 1.0 - std::pow((n - 1.0) / (m * n - 1.0), 1.0 / n);
  constexpr int kScan = 4000;
  double u1 = 0.0;
  double prev_u = u2 * 0.5 / kScan;
  double prev = q2(prev_u);
  if (prev > 0.0) {
    for (int k = 1; k < kScan; ++k) {
      const double u = u2 * (k + 0.5) / kScan;
      const double cur = q2(u);
      if (cur <= 0.0) {
        u1 = detail::bisect(q2, prev_u, u);
        break;
      }
      prev_u = u;
      prev = cur;
    }
  }
  d.x1 = u1 / r;
  d.x2 = u2 / r;
  d.q_at_zero = r * q(0.0);
  d.q_at_end = r * q(1.0);

  double G = prim.profit.G(0.0);
  if (!std::isfinite(G)) G = prim.profit.G(r);
  const double lo = std::max(0.0, prim.xbar);
  const double hi = std::min(1.0, 1.0 / r);
  constexpr int kGrid = 4000;
  std::vector<double> pi(kGrid + 1);
  for (int k = 0; k <= kGrid; ++k) pi[k] = firm_profit(prim, G, lo + (hi - lo) * k / kGrid, r);
  for (int k = 1; k < kGrid; ++k)
    if (pi[k] > pi[k - 1] && pi[k] >= pi[k + 1]) ++d.interior_maxima;
  d.unique_interior_max = d.interior_maxima == 1;
  return d;
}

InvestmentEquilibrium investment_equilibrium(double fbar, const MarketPrimitives& prim,
                                             const InvestmentOptions& opts) {
  if (!(fbar >= 0.0 && fbar <= 1.0)) throw InvalidArgument("fbar", "must lie in [0, 1]");
  const Ctx c = make_ctx(prim);
  InvestmentEquilibrium out = solve_investment(c, fbar, opts);
  out.verified = !out.rejected_candidate || out.positive;
  return out;
}

std::optional<double> f_crit(const MarketPrimitives& prim) {
  const Ctx c = make_ctx(prim);
  const auto raw = f_crit_raw(c);
  if (!raw) return std::nullopt;
  return std::clamp(*raw, 0.0, 1.0);
}

double entry_map_H(double fbar, const MarketPrimitives& prim, const InvestmentOptions& opts) {
  if (!(fbar >= 0.0 && fbar <= 1.0)) throw InvalidArgument("fbar", "must lie in [0, 1]");
  return H_at(make_ctx(prim), fbar, opts);
}

EntryEquilibrium entry_equilibrium(const MarketPrimitives& prim, const InvestmentOptions& opts) {
  const Ctx c = make_ctx(prim);
  EntryEquilibrium eq;
  eq.x_star = prim.xbar;
  const auto raw = f_crit_raw(c);
  if (!raw || *raw <= 0.0) {
    if (raw) eq.f_crit = 0.0;
    return eq;
  }
  const double fc = std::min(*raw, 1.0);
  eq.f_crit = fc;
  const double x_c = c.cp.x_crit, r_c = c.cp.r_crit;

  double hi = fc;
  if (*raw < 1.0) {
    const double G_c = prim.profit.G(fc * r_c);
    const double gross_c = G_c * r_c - prim.cost(x_c - prim.xbar);
    const double H_c = prim.entry.inverse(std::max(gross_c, 0.0));
    if (H_c >= fc) {
      eq.regime = Regime::Critical;
      eq.f_star = fc;
      eq.x_star = x_c;
      eq.r = r_c;
      eq.gross_profit = G_c;
      eq.marginal_net_profit = gross_c - prim.entry(fc);
      eq.verified = best_response_ok(c, fc, x_c, r_c, opts.verify_grid);
      if (!eq.verified) eq.notes.push_back("best-response grid check failed at the critical point");
      if (oi_gap(c, fc, r_c + 1e-6 * (1.0 - r_c)) > 0.0)
        eq.notes.push_back("investment condition also holds at a higher reliability at f_crit");
      return eq;
    }
  } else {
    hi = 1.0;
    if (H_at(c, 1.0, opts) >= 1.0) eq.notes.push_back("every firm enters; interior-entry assumption fails");
  }

  InvestmentOptions inner = opts;
  inner.verify_grid = std::max(200, opts.verify_grid / 25);
  auto J = [&](double f) { return H_at(c, f, inner) - f; };
  double f_star = hi;
  if (J(hi) < 0.0 || *raw < 1.0) f_star = detail::bisect(J, 0.0, hi, 1e-15);

  const InvestmentEquilibrium inv = solve_investment(c, f_star, opts);
  eq.f_star = f_star;
  if (!inv.positive) {
    eq.regime = Regime::Unproductive;
    eq.f_star = 0.0;
    eq.notes.push_back("entry fixed point has no positive investment equilibrium");
    return eq;
  }
  eq.regime = Regime::Noncritical;
  eq.x_star = inv.x_star;
  eq.r = inv.r;
  eq.gross_profit = prim.profit.G(f_star * inv.r);
  eq.marginal_net_profit = eq.gross_profit * inv.r - prim.cost(inv.x_star - prim.xbar) - prim.entry(f_star);
  if (inv.roots > 1) eq.notes.push_back("several solutions of the investment condition; largest verified one used");
  if (prim.tech.m < 3) eq.notes.push_back("m < 3: uniqueness of the investment equilibrium is only grid-verified");
  return eq;
}

double kappa_lower(const MarketPrimitives& prim) {
  const Ctx c = make_ctx(prim);
  const double g0 = prim.profit.g0();
  if (std::isinf(g0)) return 0.0;
  return prim.cost.derivative(c.cp.x_crit - prim.xbar) / (g0 * threshold_denominator(c));
}

std::optional<double> kappa_upper(const MarketPrimitives& prim) {
  const Ctx c = make_ctx(prim);
  // kappa_lower * g(0), finite even when g(0) is not.
  const double markup = prim.cost.derivative(c.cp.x_crit - prim.xbar) / threshold_denominator(c);
  const double gross = markup * c.cp.r_crit - prim.cost(c.cp.x_crit - prim.xbar);
  if (!(gross > prim.entry(0.0))) return std::nullopt;
  const double f = prim.entry.inverse(gross);
  if (!(f > 0.0 && f < 1.0)) return std::nullopt;
  const double g = prim.profit.g(f * c.cp.r_crit);
  if (!(g > 0.0)) return std::nullopt;
  return markup / g;
}

double shock_response(const EntryEquilibrium& eq, const MarketPrimitives& prim, double eps, ShockMode mode) {
  if (!(eps >= 0.0)) throw InvalidArgument("eps", "must be >= 0");
  if (eps == 0.0) return eq.output();
  if (eq.regime == Regime::Unproductive) return 0.0;
  if (mode == ShockMode::FixedInvestment) {
    const double x = std::max(0.0, eq.x_star - eps);
    return eq.f_star * rho(prim.tech, x);
  }
  const MarketPrimitives shocked = prim.with_xbar(prim.xbar - eps);
  const Ctx c{shocked, critical_point(shocked.tech)};
  const double r = stable_root_below(c, eq.f_star, eq.r);
  return eq.f_star * r;
}

Fragility classify_fragility(const EntryEquilibrium& eq, const MarketPrimitives& prim, ShockMode mode,
                             double eps) {
  if (eq.regime == Regime::Unproductive) throw InvalidArgument("eq", "fragility is defined for productive equilibria only");
  if (!(eps > 0.0)) throw InvalidArgument("eps", "must be positive");
  return shock_response(eq, prim, eps, mode) > 0.0 ? Fragility::Robust : Fragility::Fragile;
}

PrimitivesReport validate_primitives(const MarketPrimitives& prim) {
  PrimitivesReport rep;
  try {
    validate(prim.tech);
  } catch (const InvalidArgument& e) {
    rep.violations.push_back(std::string("technology: ") + e.what());
    return rep;
  }
  if (prim.tech.m < 2 || prim.tech.n < 2) {
    rep.violations.push_back("technology: equilibrium analysis needs m >= 2 and n >= 2");
    return rep;
  }

  // Entry cost.
  if (prim.entry(0.0) != 0.0) rep.violations.push_back("entry: Phi(0) != 0");
  for (int k = 1; k <= 100; ++k)
    if (!(prim.entry(k / 100.0) > prim.entry((k - 1) / 100.0))) {
      rep.violations.push_back("entry: Phi not strictly increasing");
      break;
    }

  // Cost shape and baseline.
  const CriticalPoint cp = critical_point(prim.tech);
  try {
    prim.cost.validate();
  } catch (const InvalidArgument& e) {
    rep.violations.push_back(std::string("cost: ") + e.what());
  }
  if (!prim.cost.satisfies_inada()) rep.notes.push_back("cost lacks the Inada condition; boundary solutions are checked explicitly");
  if (!(prim.xbar >= 0.0 && prim.xbar < cp.x_crit)) rep.violations.push_back("xbar: must lie in [0, x_crit)");

  // Gross profit shape.
  for (int k = 0; k <= 100; ++k) {
    const double q = k / 100.0;
    const double g = prim.profit.g(q);
    if (k < 100 ? !(g > 0.0) : !(g >= 0.0)) {
      rep.violations.push_back("g must be positive on [0, 1) and nonnegative at 1");
      break;
    }
    if (k > 0 && !(g < prim.profit.g((k - 1) / 100.0))) {
      rep.violations.push_back("g must be strictly decreasing on [0, 1]");
      break;
    }
  }
  if (!rep.ok()) return rep;

  // Single interior profit maximum at x_crit and x = 1.
  for (double x : {cp.x_crit, 1.0}) {
    const InvestmentDiagnostics d = investment_diagnostics(x, prim);
    if (!d.unique_interior_max) {
      std::ostringstream os;
      os << "investment: profit has " << d.interior_maxima << " interior local maxima at x = " << x;
      rep.violations.push_back(os.str());
    }
  }

  // Full entry is unprofitable for the marginal firm.
  const InvestmentEquilibrium full = investment_equilibrium(1.0, prim);
  const double gross = full.positive ? prim.profit.G(full.r) * full.r - prim.cost(full.x_star - prim.xbar) : 0.0;
  rep.notes.push_back(full.positive ? "full-entry check evaluated on the positive-investment branch x*(1) > xbar"
                                    : "full-entry check evaluated on the x*(1) = xbar branch");
  if (!(prim.entry(1.0) > gross)) rep.violations.push_back("full entry: Phi(1) must exceed the gross profit at full entry");

  if (prim.tech.m < 3) rep.notes.push_back("m < 3: uniqueness of x*(fbar) is only grid-verified");
  return rep;
}

}  // namespace fraglab
