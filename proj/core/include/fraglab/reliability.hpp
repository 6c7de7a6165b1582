#pragma once

#include <vector>

namespace fraglab {

// m inputs per product, n potential suppliers per input.
struct Technology {
  int m = 2;
  int n = 2;
};

struct CriticalPoint {
  double x_crit = 1.0;
  double r_crit = 1.0;
};

struct FixedPointOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  double floor = 1e-9;  // iterates below this are reported as 0
};

void validate(const Technology& tech);

// (1 - (1 - x r)^n)^m
double reliability_map(const Technology& tech, double x, double r);

// Inverse of rho on its increasing branch. May exceed 1. Throws on r <= 0.
double chi(const Technology& tech, double r);

// d chi / d r, analytic.
double chi_derivative(const Technology& tech, double r);

// chi for the tau-truncated model; defined for r in (tau, 1].
double chi_tau(const Technology& tech, double tau, double r);

// Minimiser of chi over (0, 1]. Requires m >= 2.
CriticalPoint critical_point(const Technology& tech);

// Percolation threshold 1/n of a single-input supply tree.
double simple_threshold(int n);

// Largest fixed point of reliability_map, reached by iterating from r = 1.
double rho(const Technology& tech, double x, const FixedPointOptions& opts = {});

// Depth-T tree: rho_1 = 1, rho_t = (1 - (1 - rho_{t-1} x)^{n_t})^{m_t}.
// tier_overrides[k], when present, replaces tech at tier k + 2.
double rho_truncated(const Technology& tech, double x, int tiers,
                     const std::vector<Technology>& tier_overrides = {});

// Largest fixed point of r -> tau + (1 - tau) reliability_map(r).
double rho_tau(const Technology& tech, double x, double tau,
               const FixedPointOptions& opts = {});

// Probability of sourcing every input from an exogenous spot market.
double market_sourcing_prob(const Technology& tech, double x);

}  // namespace fraglab
