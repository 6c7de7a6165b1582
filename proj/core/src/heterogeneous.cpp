#include "fraglab/heterogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "detail.hpp"
#include "fraglab/error.hpp"

namespace fraglab {

int HeterogeneousEconomy::index_of(const std::string& name) const {
  const auto it = std::find(products.begin(), products.end(), name);
  return it == products.end() ? -1 : static_cast<int>(it - products.begin());
}

const InputEdge* HeterogeneousEconomy::edge(int i, int j) const {
  for (const InputEdge& e : inputs.at(i))
    if (e.input == j) return &e;
  return nullptr;
}

void HeterogeneousEconomy::validate() const {
  const int P = size();
  if (P == 0) throw InvalidArgument("products", "must not be empty");
  if (static_cast<int>(inputs.size()) != P) throw InvalidArgument("inputs", "one input list per product required");
  for (int i = 0; i < P; ++i) {
    if (inputs[i].empty()) throw InvalidArgument("inputs", products[i] + " has no inputs");
    std::vector<int> seen;
    for (const InputEdge& e : inputs[i]) {
      if (e.input < 0 || e.input >= P) throw InvalidArgument("inputs", products[i] + " references an unknown product");
      if (std::find(seen.begin(), seen.end(), e.input) != seen.end())
        throw InvalidArgument("inputs", products[i] + " lists an input twice");
      seen.push_back(e.input);
      if (e.n < 1) throw InvalidArgument("n", "must be >= 1");
      if (!(e.gamma > 0.0)) throw InvalidArgument("gamma", "must be positive");
      if (!(e.xbar >= 0.0 && e.xbar < 1.0)) throw InvalidArgument("xbar", "must lie in [0, 1)");
    }
  }
  if (!alpha.empty()) {
    if (static_cast<int>(alpha.size()) != P) throw InvalidArgument("alpha", "one value per product required");
    for (double a : alpha)
      if (!(a > 0.0)) throw InvalidArgument("alpha", "must be positive");
  }
  if (!beta.empty()) {
    if (static_cast<int>(beta.size()) != P) throw InvalidArgument("beta", "one value per product required");
    for (double b : beta)
      if (!(b > 0.0)) throw InvalidArgument("beta", "must be positive");
  }
}

namespace {

double link_prob(double x, double r, int n) { return detail::one_minus_pow_complement(std::min(1.0, x * r), n); }

// Marginal benefit of edge e per unit of G and of the other edges' product.
double link_marginal(const InputEdge& e, double x, double r) {
  const double u = std::min(1.0, x * r);
  return e.n * std::pow(1.0 - u, e.n - 1) * r;
}

// log of MB/MC for one edge, without the common factor G * prod_l P_l.
double log_ratio(const InputEdge& e, double x, double r) {
  return std::log(link_marginal(e, x, r)) - std::log(link_prob(x, r, e.n)) - std::log(e.gamma * (x - e.xbar));
}

double d_log_ratio(const InputEdge& e, double x, double r) {
  const double u = std::min(1.0, x * r);
  const double P = link_prob(x, r, e.n);
  double d = -e.n * std::pow(1.0 - u, e.n - 1) * r / P - 1.0 / (x - e.xbar);
  if (e.n > 1) d -= (e.n - 1) * r / (1.0 - u);
  return d;
}

double upper_strength(double r) { return r > 0.0 ? std::min(1.0, 1.0 / r) : 1.0; }

// Root of log_ratio(e, x, r) = target on (xbar, min(1, 1/r)]. Returns the
// upper end when the ratio stays above target there (corner at x = 1), and
// nullopt when it stays above target all the way to 1/r.
std::optional<double> ratio_root(const InputEdge& e, double r, double target, double guess) {
  if (!(r > 0.0)) return std::nullopt;
  const double cap = upper_strength(r);
  auto f = [&](double x) { return log_ratio(e, x, r) - target; };
  double hi = cap;
  if (f(hi) >= 0.0) {
    if (cap < 1.0 / r) return cap;
    return std::nullopt;
  }
  double lo = e.xbar;
  double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) lo = x;
    else hi = x;
    double nx = x - fx / d_log_ratio(e, x, r);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 1e-15) return nx;
    x = nx;
    if (hi - lo <= 1e-15) break;
  }
  return x;
}

// Row of X satisfying the ratio conditions for a given pin. Returns false if
// some edge has no solution.
bool solve_row(const HeterogeneousEconomy& econ, const std::vector<double>& r, int i, double pin,
               std::vector<double>& row) {
  const auto& edges = econ.inputs[i];
  const InputEdge& e1 = edges.front();
  const double r1 = r[e1.input];
  if (!(r1 > 0.0) || !(pin > e1.xbar)) return false;
  row[e1.input] = pin;
  const double target = log_ratio(e1, pin, r1);
  for (std::size_t k = 1; k < edges.size(); ++k) {
    const InputEdge& e = edges[k];
    const auto x = ratio_root(e, r[e.input], target, row[e.input]);
    if (!x) return false;
    row[e.input] = *x;
  }
  return true;
}

double row_reliability(const HeterogeneousEconomy& econ, const StrengthMatrix& X, const std::vector<double>& r,
                       int i) {
  double out = 1.0;
  for (const InputEdge& e : econ.inputs[i]) out *= link_prob(X[i][e.input], r[e.input], e.n);
  return out;
}

// Tarjan's algorithm; components come out inputs-first.
std::vector<std::vector<int>> strongly_connected(const HeterogeneousEconomy& econ) {
  const int P = econ.size();
  std::vector<int> index(P, -1), low(P, 0), stack;
  std::vector<bool> on_stack(P, false);
  std::vector<std::vector<int>> out;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const InputEdge& e : econ.inputs[v]) {
      const int w = e.input;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> comp;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < P; ++v)
    if (index[v] < 0) visit(v);
  return out;
}

struct PathState {
  StrengthMatrix X;
  std::vector<double> r;
  std::vector<bool> collapsed;  // per component
};

enum class SccStatus { Converged, Collapsed };

// Fills row i of X for supplier reliabilities r; false if it has no solution.
using RowSolver = std::function<bool(const std::vector<double>& r, int i, std::vector<double>& row)>;

// One application of r <- map(X(r), r) on a component.
bool component_step(const HeterogeneousEconomy& econ, const std::vector<int>& comp, const RowSolver& solve,
                    const std::vector<double>& r, StrengthMatrix& X, std::vector<double>& out) {
  for (int i : comp)
    if (!solve(r, i, X[i])) return false;
  for (std::size_t k = 0; k < comp.size(); ++k) out[k] = row_reliability(econ, X, r, comp[k]);
  return true;
}

// Solves A d = b in place by Gaussian elimination; returns the sign of det A
// (0 if singular).
int solve_linear(std::vector<std::vector<double>> A, std::vector<double>& b) {
  const std::size_t k = b.size();
  int sign = 1;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < k; ++i)
      if (std::abs(A[i][c]) > std::abs(A[p][c])) p = i;
    if (A[p][c] == 0.0) return 0;
    if (p != c) {
      std::swap(A[p], A[c]);
      std::swap(b[p], b[c]);
      sign = -sign;
    }
    if (A[c][c] < 0.0) sign = -sign;
    for (std::size_t i = c + 1; i < k; ++i) {
      const double f = A[i][c] / A[c][c];
      for (std::size_t j = c; j < k; ++j) A[i][j] -= f * A[c][j];
      b[i] -= f * b[c];
    }
  }
  for (std::size_t c = k; c-- > 0;) {
    for (std::size_t j = c + 1; j < k; ++j) b[c] -= A[c][j] * b[j];
    b[c] /= A[c][c];
  }
  return sign;
}

// Fills A = I - T'(r) by forward differences; T(r) must already be in t.
bool jacobian_gap(const HeterogeneousEconomy& econ, const std::vector<int>& comp, const RowSolver& solve,
                  const std::vector<double>& r, const StrengthMatrix& X, const std::vector<double>& t,
                  std::vector<std::vector<double>>& A) {
  const std::size_t k = comp.size();
  std::vector<double> tp(k);
  A.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> rp = r;
    const double h = 1e-7 * std::max(1e-3, r[comp[c]]);
    rp[comp[c]] += h;
    StrengthMatrix Xp = X;
    if (!component_step(econ, comp, solve, rp, Xp, tp)) return false;
    for (std::size_t a = 0; a < k; ++a) A[a][c] = (a == c ? 1.0 : 0.0) - (tp[a] - t[a]) / h;
  }
  return true;
}

// Newton on r = T(r) from the current state. Succeeds only on a root where
// I - T' has positive determinant, which rules out the unstable branch.
bool newton_component(const HeterogeneousEconomy& econ, const std::vector<int>& comp, const RowSolver& solve,
                      PathState& st, const HetConstructOptions& opts) {
  const std::size_t k = comp.size();
  std::vector<double> r = st.r, t(k);
  StrengthMatrix X = st.X;
  std::vector<std::vector<double>> A;
  for (int it = 0; it < 100; ++it) {
    if (!component_step(econ, comp, solve, r, X, t)) return false;
    std::vector<double> F(k);
    double res = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      F[a] = t[a] - r[comp[a]];
      res = std::max(res, std::abs(F[a]));
    }
    if (!jacobian_gap(econ, comp, solve, r, X, t, A)) return false;
    const int det = solve_linear(A, F);
    if (res < 1e-14) {
      if (det <= 0) return false;
      st.r = r;
      st.X = X;
      return true;
    }
    if (det == 0) return false;
    double lambda = 1.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double next = r[comp[a]] + F[a];
      if (next > 1.0) lambda = std::min(lambda, 0.5 * (1.0 - r[comp[a]]) / F[a]);
      if (next < opts.collapse) lambda = std::min(lambda, 0.5 * (r[comp[a]] - opts.collapse) / -F[a]);
    }
    for (std::size_t a = 0; a < k; ++a) r[comp[a]] += lambda * F[a];
  }
  return false;
}

// Largest stable solution of r = map(X(r), r) over one component, with the
// other products held fixed. Newton handles the common case; plain iteration
// decides the rest. While iterating, a state that is still falling and has
// passed the point where I - T' turns singular has no stable fixed point left
// above zero.
SccStatus solve_component(const HeterogeneousEconomy& econ, const std::vector<int>& comp, const RowSolver& solve,
                          PathState& st, const HetConstructOptions& opts) {
  if (newton_component(econ, comp, solve, st, opts)) return SccStatus::Converged;
  std::vector<double> next(comp.size());
  std::vector<std::vector<double>> A;
  for (long it = 0; it < opts.max_iter; ++it) {
    if (!component_step(econ, comp, solve, st.r, st.X, next)) return SccStatus::Collapsed;
    double diff = 0.0;
    bool falling = true;
    for (std::size_t k = 0; k < comp.size(); ++k) {
      if (next[k] < opts.collapse) return SccStatus::Collapsed;
      diff = std::max(diff, std::abs(next[k] - st.r[comp[k]]));
      if (!(next[k] < st.r[comp[k]])) falling = false;
    }
    if (falling && it % 64 == 63 && jacobian_gap(econ, comp, solve, st.r, st.X, next, A)) {
      std::vector<double> dummy(comp.size(), 0.0);
      if (solve_linear(A, dummy) < 0) return SccStatus::Collapsed;
    }
    for (std::size_t k = 0; k < comp.size(); ++k) st.r[comp[k]] = next[k];
    if (diff < 1e-14) return SccStatus::Converged;
  }
  return SccStatus::Collapsed;
}

// Solves components inputs-first. Components with `active[c]` false keep
// their state. Returns true if any component collapsed.
bool evaluate_components(const HeterogeneousEconomy& econ, const std::vector<std::vector<int>>& comps,
                         const std::vector<int>& comp_of, const RowSolver& solve, PathState& st,
                         const HetConstructOptions& opts, const std::vector<bool>& active = {}) {
  bool any = false;
  st.collapsed.assign(comps.size(), false);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (!active.empty() && !active[c]) continue;
    bool upstream_dead = false;
    for (int i : comps[c])
      for (const InputEdge& e : econ.inputs[i])
        if (comp_of[e.input] != static_cast<int>(c) && st.collapsed[comp_of[e.input]]) upstream_dead = true;
    if (upstream_dead || solve_component(econ, comps[c], solve, st, opts) == SccStatus::Collapsed) {
      st.collapsed[c] = true;
      any = true;
      for (int i : comps[c]) st.r[i] = 0.0;
    }
  }
  return any;
}

bool evaluate_path(const HeterogeneousEconomy& econ, const std::vector<std::vector<int>>& comps,
                   const std::vector<int>& comp_of, const std::vector<double>& pins, PathState& st,
                   const HetConstructOptions& opts) {
  const RowSolver solve = [&](const std::vector<double>& r, int i, std::vector<double>& row) {
    return solve_row(econ, r, i, pins[i], row);
  };
  return evaluate_components(econ, comps, comp_of, solve, st, opts);
}

std::vector<double> pins_at(const std::vector<double>& target, double s) {
  std::vector<double> p(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) p[i] = 1.0 - s * (1.0 - target[i]);
  return p;
}

}  // namespace

std::vector<double> het_reliability_map(const HeterogeneousEconomy& econ, const StrengthMatrix& X,
                                        const std::vector<double>& r) {
  const int P = econ.size();
  if (static_cast<int>(X.size()) != P || static_cast<int>(r.size()) != P)
    throw InvalidArgument("X", "dimensions must match the number of products");
  std::vector<double> out(P);
  for (int i = 0; i < P; ++i) out[i] = row_reliability(econ, X, r, i);
  return out;
}

std::vector<double> het_rho(const HeterogeneousEconomy& econ, const StrengthMatrix& X, const HetRhoOptions& opts) {
  std::vector<double> r(econ.size(), 1.0);
  for (long it = 0; it < opts.max_iter; ++it) {
    std::vector<double> next = het_reliability_map(econ, X, r);
    double diff = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) diff = std::max(diff, std::abs(next[k] - r[k]));
    r.swap(next);
    if (diff < opts.tol) break;
  }
  for (double& v : r)
    if (v < opts.floor) v = 0.0;
  return r;
}

double het_critical_xi(const HeterogeneousEconomy& econ, const StrengthFunction& x_of_xi, double tol) {
  econ.validate();
  const int P = econ.size();
  auto positive = [&](double xi) {
    StrengthMatrix X(P, std::vector<double>(P, 0.0));
    for (int i = 0; i < P; ++i)
      for (const InputEdge& e : econ.inputs[i]) X[i][e.input] = std::clamp(x_of_xi(i, e.input, xi), 0.0, 1.0);
    HetRhoOptions o;
    o.floor = 1e-6;
    const auto r = het_rho(econ, X, o);
    return std::any_of(r.begin(), r.end(), [](double v) { return v > 0.0; });
  };
  double lo = 0.0, hi = 1.0;
  if (!positive(hi)) return 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (positive(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> het_ratio_solve(const HeterogeneousEconomy& econ, const std::vector<double>& r, int i,
                                    double pin) {
  econ.validate();
  if (i < 0 || i >= econ.size()) throw InvalidArgument("i", "product index out of range");
  if (static_cast<int>(r.size()) != econ.size()) throw InvalidArgument("r", "one value per product required");
  for (const InputEdge& e : econ.inputs[i])
    if (!(r[e.input] > 0.0)) throw InvalidArgument("r", "supplier reliabilities must be positive");
  if (!(pin > econ.inputs[i].front().xbar && pin <= 1.0)) throw InvalidArgument("pin", "must lie in (xbar, 1]");
  std::vector<double> row(econ.size(), 0.0);
  if (!solve_row(econ, r, i, pin, row))
    throw SolverError("het_ratio_solve: no strength in (xbar, 1/r_j] satisfies the ratio condition for " +
                      econ.products[i]);
  return row;
}

void het_calibrate(const HeterogeneousEconomy& econ, HetEquilibrium& eq, const HetConstructOptions& opts) {
  const int P = econ.size();
  eq.G.assign(P, 0.0);
  eq.alpha.assign(P, 0.0);
  eq.fbar.assign(P, 0.0);
  eq.beta.assign(P, 0.0);
  eq.gross_profit.assign(P, 0.0);
  eq.net_profit.assign(P, 0.0);
  for (int i = 0; i < P; ++i) {
    const auto& edges = econ.inputs[i];
    const InputEdge& e1 = edges.front();
    double others = 1.0, cost = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const InputEdge& e = edges[k];
      const double x = eq.X[i][e.input];
      if (k > 0) others *= link_prob(x, eq.r[e.input], e.n);
      cost += 0.5 * e.gamma * (x - e.xbar) * (x - e.xbar);
    }
    const double x1 = eq.X[i][e1.input];
    const double G = e1.gamma * (x1 - e1.xbar) / (others * link_marginal(e1, x1, eq.r[e1.input]));
    const double ri = eq.r[i];
    eq.G[i] = G;
    if (!econ.alpha.empty()) {
      eq.alpha[i] = econ.alpha[i];
      eq.fbar[i] = (1.0 - G / econ.alpha[i]) / ri;
    } else {
      eq.fbar[i] = opts.default_fbar;
      eq.alpha[i] = G / (1.0 - ri * opts.default_fbar);
    }
    const double gross = G * ri - cost;
    eq.gross_profit[i] = gross;
    if (eq.regime[i] == Regime::Critical)
      eq.beta[i] = econ.beta.empty() ? opts.critical_beta_share * gross / eq.fbar[i] : econ.beta[i];
    else
      eq.beta[i] = gross / eq.fbar[i];
    eq.net_profit[i] = eq.regime[i] == Regime::Critical ? gross - eq.beta[i] * eq.fbar[i] : 0.0;
  }
}

HetEquilibrium het_construct_equilibrium(const HeterogeneousEconomy& econ, const std::vector<double>& target,
                                         const HetConstructOptions& opts) {
  econ.validate();
  const int P = econ.size();
  if (static_cast<int>(target.size()) != P) throw InvalidArgument("pins", "one pin per product required");
  double span = 0.0;
  for (int i = 0; i < P; ++i) {
    if (!(target[i] > 0.0 && target[i] <= 1.0)) throw InvalidArgument("pins", "must lie in (0, 1]");
    span = std::max(span, 1.0 - target[i]);
  }
  if (span <= 0.0) throw InvalidArgument("pins", "direction is zero; pins must move below 1");

  const auto comps = strongly_connected(econ);
  std::vector<int> comp_of(P);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int i : comps[c]) comp_of[i] = static_cast<int>(c);

  PathState good{StrengthMatrix(P, std::vector<double>(P, 0.0)), std::vector<double>(P, 1.0), {}};
  double s_good = 0.0;
  if (evaluate_path(econ, comps, comp_of, pins_at(target, 0.0), good, opts))
    throw SolverError("het_construct_equilibrium: economy collapses at unit strengths");

  // Largest s keeping every pin above its baseline.
  double s_max = std::numeric_limits<double>::infinity();
  for (int i = 0; i < P; ++i)
    if (target[i] < 1.0) s_max = std::min(s_max, (1.0 - econ.inputs[i].front().xbar) / (1.0 - target[i]));

  const double ds = opts.step / span;
  PathState bad;
  double s_bad = -1.0;
  std::optional<PathState> at_target;
  for (long k = 1;; ++k) {
    double s = k * ds;
    if (!at_target && s > 1.0) s = 1.0;
    if (s >= s_max) throw SolverError("het_construct_equilibrium: direction never reaches the critical surface");
    PathState trial = good;
    if (evaluate_path(econ, comps, comp_of, pins_at(target, s), trial, opts)) {
      bad = std::move(trial);
      s_bad = s;
      break;
    }
    good = std::move(trial);
    s_good = s;
    if (s == 1.0 && !at_target) {
      at_target = good;
      k = static_cast<long>(std::floor(1.0 / ds));
    }
  }
  while (s_bad - s_good > opts.s_tol * std::max(1.0, s_bad)) {
    const double s = 0.5 * (s_good + s_bad);
    PathState trial = good;
    if (evaluate_path(econ, comps, comp_of, pins_at(target, s), trial, opts)) {
      bad = std::move(trial);
      s_bad = s;
    } else {
      good = std::move(trial);
      s_good = s;
    }
  }

  HetEquilibrium eq;
  eq.critical_s = s_good;
  const bool use_target = at_target && opts.stop_at_target;
  const PathState& chosen = use_target ? *at_target : good;
  eq.X = chosen.X;
  eq.r = chosen.r;
  eq.path_s = use_target ? 1.0 : s_good;
  eq.pins = pins_at(target, eq.path_s);
  eq.component = comp_of;
  eq.regime.assign(P, Regime::Noncritical);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (!bad.collapsed[c]) continue;
    bool upstream_dead = false;
    for (int i : comps[c])
      for (const InputEdge& e : econ.inputs[i])
        if (comp_of[e.input] != static_cast<int>(c) && bad.collapsed[comp_of[e.input]]) upstream_dead = true;
    if (!upstream_dead)
      for (int i : comps[c]) eq.regime[i] = Regime::Critical;
  }
  het_calibrate(econ, eq, opts);
  return eq;
}

double het_foc_residual(const HeterogeneousEconomy& econ, const HetEquilibrium& eq) {
  double worst = 0.0;
  for (int i = 0; i < econ.size(); ++i) {
    for (const InputEdge& e : econ.inputs[i]) {
      double others = 1.0;
      for (const InputEdge& l : econ.inputs[i])
        if (l.input != e.input) others *= link_prob(eq.X[i][l.input], eq.r[l.input], l.n);
      const double x = eq.X[i][e.input];
      const double mb = eq.G[i] * others * link_marginal(e, x, eq.r[e.input]);
      worst = std::max(worst, std::abs(mb - e.gamma * (x - e.xbar)));
    }
  }
  return worst;
}

WeakestLinkReport weakest_link_analysis(const HeterogeneousEconomy& econ, const HetEquilibrium& eq) {
  econ.validate();
  const int P = econ.size();
  WeakestLinkReport rep;
  rep.components = strongly_connected(econ);
  rep.component.assign(P, 0);
  for (std::size_t c = 0; c < rep.components.size(); ++c)
    for (int i : rep.components[c]) rep.component[i] = static_cast<int>(c);
  rep.regime = eq.regime;
  for (const auto& comp : rep.components)
    for (int i : comp)
      if (eq.regime[i] != eq.regime[comp.front()]) rep.regime_homogeneous = false;

  // depends[k][i]: k reaches i along input edges.
  std::vector<std::vector<bool>> reach(P, std::vector<bool>(P, false));
  for (int k = 0; k < P; ++k) {
    std::vector<int> todo{k};
    reach[k][k] = true;
    while (!todo.empty()) {
      const int v = todo.back();
      todo.pop_back();
      for (const InputEdge& e : econ.inputs[v])
        if (!reach[k][e.input]) {
          reach[k][e.input] = true;
          todo.push_back(e.input);
        }
    }
  }
  for (int i = 0; i < P; ++i) {
    if (eq.regime[i] != Regime::Critical) continue;
    std::vector<int> fails;
    for (int k = 0; k < P; ++k)
      if (reach[k][i]) fails.push_back(k);
    rep.failure_sets[i] = std::move(fails);
  }
  return rep;
}

namespace {

double row_profit(const HeterogeneousEconomy& econ, int i, const std::vector<double>& row,
                  const std::vector<double>& r, double G) {
  double prob = 1.0, cost = 0.0;
  for (const InputEdge& e : econ.inputs[i]) {
    const double x = row[e.input];
    prob *= link_prob(x, r[e.input], e.n);
    cost += 0.5 * e.gamma * (x - e.xbar) * (x - e.xbar);
  }
  return G * prob - cost;
}

// log(MB_1 / MC_1) for pin x1 with the other edges on their ratio paths; NaN
// when some other edge has no ratio solution.
double pin_condition(const HeterogeneousEconomy& econ, int i, double x1, const std::vector<double>& r, double G,
                     std::vector<double>& row) {
  if (!solve_row(econ, r, i, x1, row)) return std::numeric_limits<double>::quiet_NaN();
  double logprob = 0.0;
  for (const InputEdge& e : econ.inputs[i]) logprob += std::log(link_prob(row[e.input], r[e.input], e.n));
  const InputEdge& e1 = econ.inputs[i].front();
  return std::log(G) + logprob + log_ratio(e1, x1, r[e1.input]);
}

void best_response_row(const HeterogeneousEconomy& econ, int i, const std::vector<double>& r, double G,
                       std::vector<double>& row) {
  const auto& edges = econ.inputs[i];
  std::vector<double> corner(row.size(), 0.0);
  for (const InputEdge& e : edges) corner[e.input] = e.xbar;
  bool dead = !(G > 0.0);
  for (const InputEdge& e : edges)
    if (!(r[e.input] > 0.0)) dead = true;
  if (dead) {
    row = corner;
    return;
  }
  const InputEdge& e1 = edges.front();
  const double lo = e1.xbar, hi = upper_strength(r[e1.input]);
  std::vector<double> work = row;
  auto h = [&](double x1) { return pin_condition(econ, i, x1, r, G, work); };

  double best_profit = row_profit(econ, i, corner, r, G);
  std::vector<double> best = corner;
  auto consider = [&](double a, double b) {
    const double x1 = detail::bisect(h, a, b, 1e-15);
    if (std::isnan(h(x1))) return;
    const double pr = row_profit(econ, i, work, r, G);
    if (pr > best_profit) {
      best_profit = pr;
      best = work;
    }
  };

  // Warm start: a sign change near the current pin.
  const double x0 = row[e1.input];
  if (x0 > lo && x0 <= hi) {
    const double a = std::max(lo + 1e-12, x0 - 0.02), b = std::min(hi, x0 + 0.02);
    const double ha = h(a), hb = h(b);
    if (ha > 0.0 && hb < 0.0) {
      consider(a, b);
      if (best_profit > row_profit(econ, i, corner, r, G)) {
        row = best;
        return;
      }
    }
  }
  constexpr int kScan = 400;
  double prev_x = lo + (hi - lo) / kScan, prev_h = h(prev_x);
  for (int k = 2; k <= kScan; ++k) {
    const double x = lo + (hi - lo) * k / kScan;
    const double hx = h(x);
    if (!std::isnan(prev_h) && !std::isnan(hx) && prev_h > 0.0 && hx <= 0.0) consider(prev_x, x);
    prev_x = x;
    prev_h = hx;
  }
  if (!std::isnan(prev_h) && prev_h > 0.0) consider(hi, hi);
  row = best;
}

}  // namespace

std::vector<double> het_shock(const HeterogeneousEconomy& econ, const HetEquilibrium& eq, int i, int j, double eps) {
  econ.validate();
  const int P = econ.size();
  if (i < 0 || i >= P || j < 0 || j >= P) throw InvalidArgument("edge", "product index out of range");
  if (!(eps >= 0.0)) throw InvalidArgument("eps", "must be >= 0");
  if (!econ.edge(i, j)) throw InvalidArgument("edge", econ.products[j] + " is not an input of " + econ.products[i]);
  if (eps == 0.0) return eq.r;

  HeterogeneousEconomy shocked = econ;
  for (InputEdge& e : shocked.inputs[i])
    if (e.input == j) e.gamma += eps;

  // The shocked producer re-solves its first-order condition at the pre-shock
  // reliabilities and gross profit, which sets a new pin. Every row then stays
  // on its pinned ratio path, as in the construction.
  std::vector<double> pins = eq.pins;
  std::vector<double> row = eq.X[i];
  best_response_row(shocked, i, eq.r, eq.G[i], row);
  pins[i] = row[shocked.inputs[i].front().input];
  const RowSolver solve = [&](const std::vector<double>& r, int k, std::vector<double>& out) {
    return pins[k] > 0.0 && solve_row(shocked, r, k, pins[k], out);
  };

  const auto comps = strongly_connected(econ);
  std::vector<int> comp_of(P);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int k : comps[c]) comp_of[k] = static_cast<int>(c);
  // Only components that depend on i, directly or through other inputs, respond.
  std::vector<bool> active(comps.size(), false);
  active[comp_of[i]] = true;
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int k : comps[c])
      for (const InputEdge& e : econ.inputs[k])
        if (active[comp_of[e.input]]) active[c] = true;

  PathState st{eq.X, eq.r, {}};
  evaluate_components(shocked, comps, comp_of, solve, st, HetConstructOptions{}, active);
  return st.r;
}

}  // namespace fraglab
