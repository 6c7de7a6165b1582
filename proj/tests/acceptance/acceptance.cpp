// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fraglab/cascade.hpp"
#include "fraglab/equilibrium.hpp"
#include "fraglab/heterogeneous.hpp"
#include "fraglab/montecarlo.hpp"
#include "fraglab/planner.hpp"
#include "fraglab/reliability.hpp"

using namespace fraglab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

MarketPrimitives sector(double kappa) {
  MarketPrimitives p;
  p.tech = {2, 5};
  p.cost = CostModel::power(2.0, 2.0);
  p.profit = GrossProfitModel::linear(kappa);
  p.entry = {2.0, 1.0, 0.0};
  return p;
}

MarketPrimitives five_three(double kappa) {
  MarketPrimitives p;
  p.tech = {5, 3};
  p.cost = CostModel::power(1.0, 2.0);
  p.profit = GrossProfitModel::linear(kappa, 5.0, 1.0);
  p.entry = {1.0, 1.0, 0.0};
  return p;
}

// ---------------------------------------------------------------- 1
void thresholds(Outcome& o) {
  const double lo = kappa_lower(sector(1.0));
  const auto hi = kappa_upper(sector(1.0));
  o.detail << "kappa_lower=" << lo << " kappa_upper=" << (hi ? *hi : NAN);
  o.require(std::abs(lo - 1.22) <= 0.01, "kappa_lower within 1.22 +- 0.01");
  o.require(hi && std::abs(*hi - 1.38) <= 0.01, "kappa_upper within 1.38 +- 0.01");
}

// ---------------------------------------------------------------- 2
void discontinuity(Outcome& o) {
  const Technology t{2, 2};
  const CriticalPoint cp = critical_point(t);
  o.detail << "x_crit=" << cp.x_crit << " r_crit=" << cp.r_crit;
  o.require(cp.r_crit >= 0.70 && cp.r_crit <= 0.85, "r_crit in [0.70, 0.85]");
  o.require(std::abs(cp.r_crit - 0.8) <= 0.02, "r_crit close to 0.8");
  double worst = 0.0;
  for (int k = 0; k <= 100000; ++k) {
    const double x = k / 100000.0;
    if (x < cp.x_crit) worst = std::max(worst, rho(t, x));
  }
  o.require(worst <= 1e-9, "rho vanishes below x_crit");
}

// ---------------------------------------------------------------- 3
void finite_tiers(Outcome& o) {
  const double hi = rho_truncated({5, 4}, 0.66, 7), lo = rho_truncated({5, 4}, 0.61, 7);
  o.detail << "rho7(0.66)=" << hi << " rho7(0.61)=" << lo;
  o.require(hi >= 0.75 && hi <= 0.85, "rho7(0.66) in [0.75, 0.85]");
  o.require(lo >= 0.05 && lo <= 0.15, "rho7(0.61) in [0.05, 0.15]");
}

// ---------------------------------------------------------------- 4
HeterogeneousEconomy seven_products(const std::vector<double>& alpha, const std::vector<double>& beta) {
  HeterogeneousEconomy e;
  e.products = {"a", "b", "c", "d", "e", "f", "g"};
  const std::vector<std::vector<int>> in = {{0, 1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2},
                                            {0, 5, 6},    {0, 4, 6}, {0, 4, 5}};
  for (int i = 0; i < 7; ++i) {
    std::vector<InputEdge> row;
    for (int j : in[i]) row.push_back({j, i < 2 ? 3 : 2, 1.0, 0.0});
    e.inputs.push_back(row);
  }
  e.alpha = alpha;
  e.beta = beta;
  return e;
}

struct Golden {
  std::vector<double> pins;
  std::vector<double> alpha, beta_in;
  StrengthMatrix X;
  std::vector<double> r, G, fbar, beta, net;
  int critical_from, critical_to;  // half-open range of critical products
};

int compare(const std::string& name, const std::vector<double>& got, const std::vector<double>& want, double tol,
            std::ostringstream& misses) {
  int bad = 0;
  for (std::size_t i = 0; i < want.size(); ++i)
    if (!(std::abs(got[i] - want[i]) <= tol)) {
      ++bad;
      misses << " " << name << "[" << static_cast<char>('a' + i) << "]=" << got[i] << "/" << want[i];
    }
  return bad;
}

void het_goldens(Outcome& o) {
  const std::vector<Golden> cases = {
      {{0.8873, 0.8773, 0.8673, 0.8573, 0.7573, 0.7473, 0.7373},
       {40, 30, 15, 10, 3.5, 3, 2.8},
       {1, 1, 1, 1, 0.3, 0.4, 0.5},
       {{0.8873, 0.8872, 0.9315, 0.9385, 0, 0, 0},
        {0.8773, 0, 0.9204, 0.9272, 0, 0, 0},
        {0.8673, 0.8672, 0, 0.9084, 0, 0, 0},
        {0.8573, 0.8572, 0.8915, 0, 0, 0, 0},
        {0.7573, 0, 0, 0, 0, 0.9726, 0.9783},
        {0.7473, 0, 0, 0, 0.9464, 0, 0.9572},
        {0.7373, 0, 0, 0, 0.9265, 0.9317, 0}},
       {0.9926, 0.9928, 0.9387, 0.9307, 0.5384, 0.5262, 0.5145},
       {21.0836, 17.7538, 3.2818, 3.0451, 2.6780, 2.5859, 2.4990},
       {0.4764, 0.4112, 0.8322, 0.7473, 0.4362, 0.2623, 0.2089},
       {40.4397, 39.8544, 2.3021, 2.2770, 0.3000, 0.4000, 0.5000},
       {0, 0, 0, 0, 0.0728, 0.0707, 0.0461},
       4,
       7},
      {{0.7965, 0.8065, 0.8165, 0.8265, 0.8965, 0.9065, 0.9165},
       {4, 5, 6, 7, 10, 15, 20},
       {10, 4, 0.2, 0.2, 1, 1, 1},
       {{0.7965, 0.7792, 0.8735, 0.8663, 0, 0, 0},
        {0.8065, 0, 0.8859, 0.8785, 0, 0, 0},
        {0.8165, 0.8029, 0, 0.8681, 0, 0, 0},
        {0.8265, 0.8124, 0.8855, 0, 0, 0, 0},
        {0.8965, 0, 0, 0, 0, 0.8947, 0.8894},
        {0.9065, 0, 0, 0, 0.9103, 0, 0.8992},
        {0.9165, 0, 0, 0, 0.9204, 0.9146, 0}},
       {0.8837, 0.9132, 0.7653, 0.7756, 0.8778, 0.8865, 0.8951},
       {3.7758, 3.9399, 1.9995, 2.0736, 2.6608, 2.7929, 2.9372},
       {0.0634, 0.2322, 0.8712, 0.9074, 0.8361, 0.9180, 0.9531},
       {10, 4, 0.2, 0.2, 1.3613, 1.3580, 1.4345},
       {1.3246, 1.5655, 0.3236, 0.3632, 0, 0, 0},
       0,
       4},
  };
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Golden& g = cases[c];
    const HeterogeneousEconomy econ = seven_products(g.alpha, g.beta_in);
    const HetEquilibrium eq = het_construct_equilibrium(econ, g.pins);
    std::ostringstream misses;
    int bad = 0;
    for (int i = 0; i < 7; ++i) bad += compare(std::string("X") + static_cast<char>('a' + i), eq.X[i], g.X[i], 5e-4, misses);
    bad += compare("r", eq.r, g.r, 5e-4, misses);
    bad += compare("G", eq.G, g.G, 1e-3, misses);
    bad += compare("fbar", eq.fbar, g.fbar, 1e-3, misses);
    bad += compare("beta", eq.beta, g.beta, 1e-3, misses);
    bad += compare("Pi", eq.net_profit, g.net, 1e-3, misses);
    int regime_bad = 0;
    for (int i = 0; i < 7; ++i) {
      const bool crit = i >= g.critical_from && i < g.critical_to;
      if ((eq.regime[i] == Regime::Critical) != crit) ++regime_bad;
    }
    o.detail << " example" << c + 1 << ": " << bad << " value misses, " << regime_bad << " regime misses";
    if (bad > 0) o.detail << " (" << misses.str().substr(1) << ")";
    o.require(bad == 0, "example " + std::to_string(c + 1) + " values");
    o.require(regime_bad == 0, "example " + std::to_string(c + 1) + " regimes");
  }
}

// ---------------------------------------------------------------- 5
void regime_ordering(Outcome& o) {
  const CriticalPoint cp = critical_point({5, 3});
  int phase = 0, counts[3] = {0, 0, 0};
  double prev_f = -1.0, worst_mnp = 0.0, worst_x = 0.0, worst_r = 0.0;
  bool ordered = true, entry_ok = true;
  for (int k = 0; k < 200; ++k) {
    const double kappa = 0.2 + 1.8 * k / 199.0;
    const EntryEquilibrium e = entry_equilibrium(five_three(kappa));
    const int ph = static_cast<int>(e.regime);
    ordered = ordered && ph >= phase;
    phase = ph;
    ++counts[ph];
    if (e.regime == Regime::Critical) {
      worst_x = std::max(worst_x, std::abs(e.x_star - cp.x_crit));
      worst_r = std::max(worst_r, std::abs(e.r - cp.r_crit));
      entry_ok = entry_ok && e.f_star >= prev_f - 1e-12;
      prev_f = e.f_star;
    } else if (e.regime == Regime::Noncritical) {
      worst_mnp = std::max(worst_mnp, std::abs(e.marginal_net_profit));
      entry_ok = entry_ok && e.f_star >= prev_f - 1e-12;
      prev_f = e.f_star;
    }
  }
  o.detail << "points U/C/N=" << counts[0] << "/" << counts[1] << "/" << counts[2] << " max|x-x_crit|=" << worst_x
           << " max|r-r_crit|=" << worst_r << " max|mnp|=" << worst_mnp;
  o.require(ordered, "no interleaving of regimes");
  o.require(counts[0] > 0 && counts[1] > 0 && counts[2] > 0, "all three regimes present");
  o.require(worst_x < 1e-9 && worst_r < 1e-8, "critical band pinned at the critical point");
  o.require(entry_ok, "entry nondecreasing");
  o.require(worst_mnp < 1e-6, "zero marginal profit in the noncritical band");
}

// ---------------------------------------------------------------- 6
void fragility(Outcome& o) {
  const double lo = kappa_lower(sector(1.0));
  const double hi = *kappa_upper(sector(1.0));
  int critical = 0, survivors = 0;
  for (int k = 1; k <= 40; ++k) {
    const double kappa = lo + (hi - lo) * k / 40.0;
    const MarketPrimitives p = sector(kappa);
    const EntryEquilibrium e = entry_equilibrium(p);
    if (e.regime != Regime::Critical) continue;
    ++critical;
    for (ShockMode m : {ShockMode::FixedInvestment, ShockMode::ReoptimizedInvestment})
      if (shock_response(e, p, 1e-3, m) > 0.0) ++survivors;
  }
  const MarketPrimitives p = sector(1.05 * hi);
  const EntryEquilibrium e = entry_equilibrium(p);
  const double fixed = shock_response(e, p, 1e-4, ShockMode::FixedInvestment);
  const double reopt = shock_response(e, p, 1e-4, ShockMode::ReoptimizedInvestment);
  o.detail << "critical equilibria=" << critical << " surviving shocks=" << survivors << " noncritical output "
           << e.output() << " -> " << fixed << " (fixed), " << reopt << " (re-optimised)";
  o.require(critical > 0 && survivors == 0, "every critical equilibrium collapses");
  o.require(e.regime == Regime::Noncritical && fixed > 0.0 && reopt > 0.0, "noncritical equilibrium survives");
}

// ---------------------------------------------------------------- 7
void planner(Outcome& o) {
  const Technology t{2, 5};
  const CostModel c = CostModel::power(2.0, 2.0);
  const double x_crit = critical_point(t).x_crit;
  const double kc = kappa_crit_planner(t, c);
  int in_gap = 0, interior = 0;
  double worst = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double kappa = 4.0 * kc * k / 200.0;
    const PlannerSolution s = planner_solve(t, c, kappa);
    if (s.x_sp > 0.0 && s.x_sp <= x_crit) ++in_gap;
    if (!s.interior) continue;
    ++interior;
    const double h = 1e-7;
    const double drho = (rho(t, s.x_sp + h) - rho(t, s.x_sp - h)) / (2 * h);
    worst = std::max(worst, std::abs(kappa * drho - c.derivative(s.x_sp)));
  }
  o.detail << "kappa_crit=" << kc << " interior optima=" << interior << " max FOC residual=" << worst;
  o.require(in_gap == 0, "x_sp never in (0, x_crit]");
  o.require(worst < 1e-5, "FOC residual below 1e-5");
}

// ---------------------------------------------------------------- 8
FiniteSupplyNetwork random_network(std::mt19937_64& gen, int firms) {
  std::uniform_int_distribution<int> products(1, 3), slots(0, 2), links(1, 3), pick(0, firms - 1);
  std::bernoulli_distribution op(0.6);
  FiniteSupplyNetwork net;
  const int P = products(gen);
  for (int f = 0; f < firms; ++f) net.add_firm(f % P);
  for (int f = 0; f < firms; ++f) {
    const int s = slots(gen);
    for (int k = 0; k < s; ++k) {
      std::vector<SupplyLink> ls;
      const int L = links(gen);
      const int product = k % P;
      for (int l = 0; l < L; ++l) {
        int supplier = pick(gen);
        supplier -= supplier % P - product;
        if (supplier >= firms) supplier -= P;
        if (supplier >= 0) ls.push_back({supplier, op(gen)});
      }
      net.add_slot(f, product, ls);
    }
  }
  return net;
}

unsigned brute_force_maximum(const FiniteSupplyNetwork& net) {
  unsigned best = 0;
  for (unsigned mask = 0; mask < (1u << net.size()); ++mask) {
    bool ok = true;
    for (int f = 0; ok && f < net.size(); ++f) {
      if (!(mask >> f & 1u)) continue;
      for (const InputSlot& s : net.slots[f]) {
        bool any = false;
        for (const SupplyLink& l : s.links) any = any || (l.operational && (mask >> l.supplier & 1u));
        if (!any) ok = false;
      }
    }
    if (ok) best |= mask;
  }
  return best;
}

bool toy_instance() {
  FiniteSupplyNetwork n;
  const int a1 = n.add_firm(0), b1 = n.add_firm(1), b2 = n.add_firm(1), c1 = n.add_firm(2), c2 = n.add_firm(2);
  const int d2 = n.add_firm(3), d3 = n.add_firm(3), c4 = n.add_firm(2), c6 = n.add_firm(2);
  const int a2 = n.add_firm(0), a3 = n.add_firm(0), a4 = n.add_firm(0), a5 = n.add_firm(0);
  const int e1 = n.add_firm(4), e3 = n.add_firm(4), e4 = n.add_firm(4);
  n.add_slot(a1, 1, {{b1, false}, {b2, true}});
  n.add_slot(a1, 2, {{c1, true}, {c2, true}});
  n.add_slot(b1, 3, {{d2, true}});
  n.add_slot(b1, 2, {{c4, true}});
  n.add_slot(b2, 3, {{d3, true}});
  n.add_slot(b2, 2, {{c6, false}});
  n.add_slot(c1, 4, {{e1, true}});
  n.add_slot(c1, 0, {{a3, true}, {a2, true}});
  n.add_slot(c2, 4, {{e4, true}, {e3, true}});
  n.add_slot(c2, 0, {{a4, false}, {a5, false}});
  const FunctionalSet fs = maximal_functional_set(n);
  std::vector<int> stage1, stage2;
  for (int f = 0; f < n.size(); ++f) {
    if (fs.removal_stage[f] == 1) stage1.push_back(f);
    if (fs.removal_stage[f] == 2) stage2.push_back(f);
  }
  return fs.stages == 2 && stage1 == std::vector<int>{b2, c2} && stage2 == std::vector<int>{a1};
}

void monte_carlo(Outcome& o) {
  int within = 0, points = 0;
  std::uint64_t seed = 1000;
  std::ostringstream outside;
  for (int m : {2, 3})
    for (int n : {2, 3, 4}) {
      const CriticalPoint cp = critical_point({m, n});
      const int per = (m == 2 && n == 2) ? 9 : 8;  // 9 + 5 * 8 = 49, plus one below
      for (int k = 0; k < per && points < 50; ++k) {
        const double x = std::min(1.0, cp.x_crit - 0.1 + 0.3 * k / (per - 1));
        const int T = 2 + (k % 5);
        const Estimate e = sample_tree_reliability({m, n}, x, T, 100000, ++seed);
        const double exact = rho_truncated({m, n}, x, T);
        const double se = std::max(e.std_error, 1e-12);
        if (std::abs(e.value - exact) < 3 * se) ++within;
        else outside << " (" << m << "," << n << "," << x << ",T=" << T << ")";
        ++points;
      }
    }
  while (points < 50) {
    const Estimate e = sample_tree_reliability({2, 2}, 0.5, 3, 100000, ++seed);
    if (std::abs(e.value - rho_truncated({2, 2}, 0.5, 3)) < 3 * e.std_error) ++within;
    ++points;
  }
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> size(1, 12);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    const FiniteSupplyNetwork net = random_network(gen, size(gen));
    const FunctionalSet fs = maximal_functional_set(net);
    unsigned mask = 0;
    for (int f = 0; f < net.size(); ++f)
      if (fs.functional[f]) mask |= 1u << f;
    agree += mask == brute_force_maximum(net);
  }
  const bool toy = toy_instance();
  o.detail << "sampler within 3 SE at " << within << "/" << points << " points" << outside.str()
           << "; brute force agreement " << agree << "/200; toy instance " << (toy ? "ok" : "wrong");
  o.require(within >= 45, "at least 45 of 50 sampler points within 3 SE");
  o.require(agree == 200, "functional set equals brute force");
  o.require(toy, "toy instance stages");
}

// ---------------------------------------------------------------- 9
// Central 99% interval of Binomial(n, p).
std::pair<int, int> binomial_interval(int n, double p) {
  std::vector<double> pmf(n + 1);
  for (int k = 0; k <= n; ++k)
    pmf[k] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                      (n - k) * std::log1p(-p));
  double acc = 0.0;
  int lo = 0, hi = n;
  for (int k = 0; k <= n; ++k) {
    acc += pmf[k];
    if (acc > 0.005) {
      lo = k;
      break;
    }
  }
  acc = 0.0;
  for (int k = n; k >= 0; --k) {
    acc += pmf[k];
    if (acc > 0.005) {
      hi = k;
      break;
    }
  }
  return {lo, hi};
}

void cascade(Outcome& o) {
  const MarketPrimitives base = sector(1.0);
  const double p = 0.16 / 2.78;
  const auto [lo, hi] = binomial_interval(100, p);
  int inside = 0, min_count = 100, max_count = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SectorEnsemble ens = make_ensemble(base, 100, {1.22, 4.0}, {1.0}, seed);
    solve_ensemble(ens);
    const int fragile = fragility_census(ens).fragile;
    inside += fragile >= lo && fragile <= hi;
    min_count = std::min(min_count, fragile);
    max_count = std::max(max_count, fragile);
  }
  o.detail << "initially fragile in [" << min_count << ", " << max_count << "], 99% interval [" << lo << ", " << hi
           << "], inside " << inside << "/20";
  o.require(inside == 20, "initial fragile counts inside the binomial interval");

  double mean[3] = {0, 0, 0};
  const double uppers[3] = {4.0, 2.3, 2.0};
  const int seeds = 5;
  for (int u = 0; u < 3; ++u)
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
      SectorEnsemble ens = make_ensemble(base, 100, {1.22, uppers[u]}, {1.0}, seed);
      mean[u] += run_cascade(ens).total_failures / static_cast<double>(seeds);
    }
  o.detail << "; mean total failures hi=4.0/2.3/2.0: " << mean[0] << "/" << mean[1] << "/" << mean[2];
  o.require(mean[2] >= mean[1] && mean[1] >= mean[0], "failures weakly decreasing in the upper bound");

  int collapses = 0, tried = 0;
  for (std::uint64_t seed = 1; seed <= 20 && collapses == 0; ++seed) {
    SectorEnsemble ens = make_ensemble(base, 100, {1.22, 2.0}, {1.0}, seed);
    collapses += run_cascade(ens).full_collapse;
    ++tried;
  }
  o.detail << "; full collapse at hi=2.0 after " << tried << " seed(s)";
  o.require(collapses >= 1, "full collapse in at least one of 20 seeds");
}

// ---------------------------------------------------------------- 10
void properties(Outcome& o) {
  int failures = 0;
  auto check = [&](bool ok, const char* what) {
    if (!ok) {
      ++failures;
      o.detail << " [" << what << "]";
    }
  };
  // Reliability: fixed-point residual, monotonicity, inverse consistency.
  for (const Technology& t : {Technology{2, 2}, Technology{2, 5}, Technology{5, 3}, Technology{5, 4}}) {
    const CriticalPoint cp = critical_point(t);
    double prev = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double x = k / 1000.0, r = rho(t, x);
      check(r >= prev - 1e-12, "rho monotone");
      if (r > 0.0) check(std::abs(reliability_map(t, x, r) - r) < 1e-10, "rho fixed point");
      prev = r;
    }
    for (int k = 0; k <= 100; ++k) {
      const double r = cp.r_crit + 1e-3 + (1.0 - cp.r_crit - 1e-3) * k / 100.0;
      const double x = chi(t, r);
      if (x <= 1.0) check(std::abs(rho(t, x) - r) < 1e-9, "chi inverse");
    }
  }
  // Equilibrium: investment falls with entry, H strictly decreasing where positive.
  {
    const MarketPrimitives p = five_three(1.0);
    double prev_x = 2.0, prev_h = 1e9;
    for (int k = 0; k <= 100; ++k) {
      const double f = k / 100.0;
      const InvestmentEquilibrium inv = investment_equilibrium(f, p);
      if (!inv.positive) continue;
      check(inv.x_star <= prev_x + 1e-12, "x*(fbar) decreasing");
      const double h = entry_map_H(f, p);
      check(h < prev_h, "H decreasing");
      prev_x = inv.x_star;
      prev_h = h;
    }
  }
  // Heterogeneous: regime homogeneity and first-order residuals.
  for (bool first : {true, false}) {
    const HeterogeneousEconomy e = first ? seven_products({40, 30, 15, 10, 3.5, 3, 2.8}, {1, 1, 1, 1, 0.3, 0.4, 0.5})
                                         : seven_products({4, 5, 6, 7, 10, 15, 20}, {10, 4, 0.2, 0.2, 1, 1, 1});
    const std::vector<double> pins = first ? std::vector<double>{0.8873, 0.8773, 0.8673, 0.8573, 0.7573, 0.7473, 0.7373}
                                           : std::vector<double>{0.7965, 0.8065, 0.8165, 0.8265, 0.8965, 0.9065, 0.9165};
    const HetEquilibrium eq = het_construct_equilibrium(e, pins);
    check(weakest_link_analysis(e, eq).regime_homogeneous, "regime homogeneity");
    check(het_foc_residual(e, eq) < 1e-6, "MB = MC");
    const std::vector<double> r = het_rho(e, eq.X);
    const std::vector<double> again = het_reliability_map(e, eq.X, r);
    for (int i = 0; i < 7; ++i) check(std::abs(again[i] - r[i]) < 1e-11, "het fixed point");
  }
  // Monte Carlo: order independence and determinism.
  {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 20; ++t) {
      const FiniteSupplyNetwork net = random_network(gen, 25);
      const auto ref = maximal_functional_set(net).functional;
      std::vector<int> order(net.size());
      std::iota(order.begin(), order.end(), 0);
      for (int k = 0; k < 10; ++k) {
        std::shuffle(order.begin(), order.end(), gen);
        check(maximal_functional_set_sequential(net, order).functional == ref, "order independence");
      }
    }
    const Estimate a = sample_tree_reliability({3, 2}, 0.8, 5, 20000, 4, 1);
    const Estimate b = sample_tree_reliability({3, 2}, 0.8, 5, 20000, 4, 3);
    check(a.value == b.value, "sampler determinism");
  }
  // Cascade: nonincreasing survivors and output.
  {
    SectorEnsemble ens = make_ensemble(sector(1.0), 40, {1.22, 2.3}, {1.0}, 8);
    const CascadeTrajectory t = run_cascade(ens);
    for (std::size_t k = 1; k < t.steps.size(); ++k) {
      check(t.steps[k].surviving <= t.steps[k - 1].surviving, "survivors nonincreasing");
      check(t.steps[k].Y <= t.steps[k - 1].Y + 1e-15, "output nonincreasing");
    }
  }
  o.detail << "property violations=" << failures;
  o.require(failures == 0, "all sampled properties hold");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "kappa thresholds", 1, thresholds},
      {2, "reliability discontinuity", 1, discontinuity},
      {3, "finite tiers", 1, finite_tiers},
      {4, "heterogeneous goldens", 10, het_goldens},
      {5, "regime ordering", 30, regime_ordering},
      {6, "fragility", 5, fragility},
      {7, "planner", 10, planner},
      {8, "monte carlo oracle", 120, monte_carlo},
      {9, "cascade statistics", 120, cascade},
      {10, "property suites", 600, properties},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) o.require(false, "runtime budget " + std::to_string(c.budget_s) + " s");
    failed += !o.pass;
    std::printf("%s criterion %d (%s) %.2fs: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
