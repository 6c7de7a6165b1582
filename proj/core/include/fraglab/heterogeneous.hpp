#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fraglab/equilibrium.hpp"

namespace fraglab {

// One sourcing relationship of a product: the input it needs and the
// parameters of that link. Cost of strength x is gamma/2 * (x - xbar)^2.
struct InputEdge {
  int input = 0;
  int n = 1;
  double gamma = 1.0;
  double xbar = 0.0;
};

struct HeterogeneousEconomy {
  std::vector<std::string> products;
  // inputs[i] lists what product i needs; the first edge carries the pin.
  std::vector<std::vector<InputEdge>> inputs;
  std::vector<double> alpha;  // G_i(q) = alpha_i (1 - q); empty means "derive from fbar"
  std::vector<double> beta;   // Phi_i(f) = beta_i f; used for critical products only

  int size() const { return static_cast<int>(products.size()); }
  int index_of(const std::string& name) const;  // -1 if absent
  const InputEdge* edge(int i, int j) const;    // nullptr if j is not an input of i
  void validate() const;
};

// Dense matrix, X[i][j] = strength of product i's links to suppliers of j.
using StrengthMatrix = std::vector<std::vector<double>>;

struct HetRhoOptions {
  double tol = 1e-12;
  long max_iter = 2000000;
  double floor = 1e-9;  // components below this are reported as 0
};

struct HetEquilibrium {
  StrengthMatrix X;
  std::vector<double> r;
  std::vector<double> pins;
  double path_s = 0.0;      // position along the pin path where the state was taken
  double critical_s = 0.0;  // last path position before the first collapse
  std::vector<Regime> regime;
  std::vector<int> component;  // strongly connected component id per product
  std::vector<double> G, alpha, fbar, beta;
  std::vector<double> gross_profit;  // G r - sum of link costs
  std::vector<double> net_profit;    // gross_profit - beta fbar
};

struct HetConstructOptions {
  double step = 1e-4;           // largest pin decrement per march step
  double s_tol = 1e-11;         // bisection tolerance on the path parameter
  double collapse = 1e-6;       // a component below this has collapsed
  double default_fbar = 0.5;    // used when the economy has no alpha
  double critical_beta_share = 0.5;  // beta = share * gross / fbar when no beta is given
  long max_iter = 5000;  // fallback iterations once Newton fails; exhausting them counts as collapse
  // When the target pins are reached before any collapse, report the state
  // there instead of at the critical surface further along the path.
  bool stop_at_target = true;
};

struct WeakestLinkReport {
  std::vector<int> component;
  std::vector<std::vector<int>> components;
  std::vector<Regime> regime;
  bool regime_homogeneous = true;
  // For each critical product, every product that depends on it (itself included).
  std::map<int, std::vector<int>> failure_sets;
};

std::vector<double> het_reliability_map(const HeterogeneousEconomy& econ, const StrengthMatrix& X,
                                        const std::vector<double>& r);

std::vector<double> het_rho(const HeterogeneousEconomy& econ, const StrengthMatrix& X,
                            const HetRhoOptions& opts = {});

using StrengthFunction = std::function<double(int i, int j, double xi)>;

double het_critical_xi(const HeterogeneousEconomy& econ, const StrengthFunction& x_of_xi, double tol = 1e-8);

// Strengths of row i that equalise marginal benefit over marginal cost with
// the pinned first edge, given supplier reliabilities r. Entries for
// non-inputs are 0. Throws SolverError when some edge has no root.
std::vector<double> het_ratio_solve(const HeterogeneousEconomy& econ, const std::vector<double>& r, int i,
                                    double pin);

// Moves the pins from 1 towards `target`, and beyond it if nothing has
// collapsed yet, until some product's reliability first collapses. The
// components that collapse first are Critical. The reported state is the one
// at the target pins, or at the critical surface if that comes first.
HetEquilibrium het_construct_equilibrium(const HeterogeneousEconomy& econ, const std::vector<double>& target,
                                         const HetConstructOptions& opts = {});

// Calibration only: backs out G, fbar/alpha, beta and profits for a given state.
void het_calibrate(const HeterogeneousEconomy& econ, HetEquilibrium& eq, const HetConstructOptions& opts = {});

// max over edges of |MB_ij - gamma_ij (x_ij - xbar_ij)|
double het_foc_residual(const HeterogeneousEconomy& econ, const HetEquilibrium& eq);

WeakestLinkReport weakest_link_analysis(const HeterogeneousEconomy& econ, const HetEquilibrium& eq);

// Raises gamma on edge (i, j) by eps with entry held fixed. Row i re-solves its
// first-order condition at the pre-shock reliabilities, which moves its pin;
// all rows then stay on their pinned ratio paths. Only components that depend
// on i are re-solved.
std::vector<double> het_shock(const HeterogeneousEconomy& econ, const HetEquilibrium& eq, int i, int j, double eps);

}  // namespace fraglab
