#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraglab/cost.hpp"
#include "fraglab/reliability.hpp"

namespace fraglab {

// Gross profit of a functional firm, G(q) = kappa * g(q), where q = fbar * r is
// the mass of functional competitors.
//   Linear: g(q) = a (1 - b q)
//   Ces:    g(q) = gamma / (n (sigma - 1) q), gamma = (1 - iota)^2 / (lambda (2 - iota))
class GrossProfitModel {
 public:
  enum class Family { Linear, Ces };

  static GrossProfitModel linear(double kappa, double a = 1.0, double b = 1.0);
  static GrossProfitModel ces(double kappa, double sigma, double lambda, double iota, int n);

  Family family() const { return family_; }
  double kappa() const { return kappa_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }
  double iota() const { return iota_; }
  int ces_n() const { return n_; }

  double g(double q) const;
  double G(double q) const { return kappa_ * g(q); }
  // Smallest q >= 0 with g(q) = v; +inf if v <= inf g, 0 if v >= g(0).
  double g_inverse(double v) const;
  double g0() const { return g(0.0); }

  GrossProfitModel with_kappa(double kappa) const;

 private:
  GrossProfitModel() = default;
  Family family_ = Family::Linear;
  double kappa_ = 1.0;
  double a_ = 1.0, b_ = 1.0;
  double sigma_ = 2.0, lambda_ = 0.5, iota_ = 0.5;
  int n_ = 1;
};

// Entry cost of the firm at position f: Phi(f) = intercept + beta * f^p.
struct EntryModel {
  double beta = 1.0;
  double p = 1.0;
  double intercept = 0.0;

  double operator()(double f) const;
  double inverse(double v) const;  // clamps to f >= 0
};

struct MarketPrimitives {
  Technology tech{2, 5};
  CostModel cost = CostModel::power(2.0, 2.0);
  GrossProfitModel profit = GrossProfitModel::linear(1.0);
  EntryModel entry{};
  double xbar = 0.0;

  MarketPrimitives with_kappa(double kappa) const;
  MarketPrimitives with_xbar(double xbar) const;
};

struct InvestmentOptions {
  int scan = 64;              // sign-change scan points on [r_crit, 1]
  int verify_grid = 10000;    // deviation grid for the best-response check
};

struct InvestmentEquilibrium {
  double fbar = 0.0;
  double x_star = 0.0;
  double r = 0.0;
  bool positive = false;         // x_star >= x_crit with r > 0
  bool verified = true;          // best-response grid check passed
  int roots = 0;                 // sign changes found on the scan
  bool rejected_candidate = false;
};

struct InvestmentDiagnostics {
  double x1 = 0.0;  // first inflection point of Q
  double x2 = 0.0;  // maximiser of Q
  double q_at_zero = 0.0;
  double q_at_end = 0.0;  // Q at x_if = 1 / rho(x)
  int interior_maxima = 0;
  bool unique_interior_max = false;
};

enum class Regime { Unproductive, Critical, Noncritical };
std::string to_string(Regime r);

struct EntryEquilibrium {
  Regime regime = Regime::Unproductive;
  double f_star = 0.0;
  double x_star = 0.0;
  double r = 0.0;
  double gross_profit = 0.0;         // G(f_star * r)
  double marginal_net_profit = 0.0;  // G r - c(x_star - xbar) - Phi(f_star)
  std::optional<double> f_crit;
  bool verified = true;
  std::vector<std::string> notes;

  double output() const { return f_star * r; }
};

enum class ShockMode { FixedInvestment, ReoptimizedInvestment };
enum class Fragility { Fragile, Robust };
std::string to_string(ShockMode m);
std::string to_string(Fragility f);

struct PrimitivesReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  bool ok() const { return violations.empty(); }
};

// (1 - (1 - x_if r)^n)^m
double functionality_prob(double x_if, double r, const Technology& tech);

// d/dx_if of G(r fbar) * functionality_prob(x_if, r); r is the common
// reliability rho(x) of the firm's suppliers.
double marginal_benefit(double x_if, double r, double fbar, const MarketPrimitives& prim);

InvestmentDiagnostics investment_diagnostics(double x, const MarketPrimitives& prim);

InvestmentEquilibrium investment_equilibrium(double fbar, const MarketPrimitives& prim,
                                             const InvestmentOptions& opts = {});

// Entry level at which x_crit is just sustainable; nullopt when kappa is too
// small for any entry level to sustain it.
std::optional<double> f_crit(const MarketPrimitives& prim);

double entry_map_H(double fbar, const MarketPrimitives& prim, const InvestmentOptions& opts = {});

EntryEquilibrium entry_equilibrium(const MarketPrimitives& prim, const InvestmentOptions& opts = {});

double kappa_lower(const MarketPrimitives& prim);
std::optional<double> kappa_upper(const MarketPrimitives& prim);

// Output f_star * r after lowering the baseline strength by eps, entry held
// fixed. Re-optimised investment follows the stable branch down from the
// pre-shock reliability; it does not jump to a higher solution.
double shock_response(const EntryEquilibrium& eq, const MarketPrimitives& prim, double eps, ShockMode mode);

Fragility classify_fragility(const EntryEquilibrium& eq, const MarketPrimitives& prim, ShockMode mode,
                             double eps = 1e-9);

PrimitivesReport validate_primitives(const MarketPrimitives& prim);

}  // namespace fraglab
