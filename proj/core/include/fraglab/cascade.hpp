#pragma once

#include <cstdint>
#include <vector>

#include "fraglab/equilibrium.hpp"

namespace fraglab {

struct Sector {
  int id = 0;
  MarketPrimitives prim;  // prim.profit carries the current kappa
  double kappa0 = 1.0;
  bool failed = false;
  EntryEquilibrium eq;

  double kappa() const { return prim.profit.kappa(); }
  bool productive() const { return !failed && eq.regime != Regime::Unproductive; }
};

struct UniformKappa {
  double lo = 1.22;
  double hi = 4.0;
};

// kappa_s = kappa0_s * (Y / Y1)^theta, Y1 being pre-shock output.
struct Linkage {
  double theta = 1.0;

  double kappa(double kappa0, double Y, double Y1) const;
};

struct SectorEnsemble {
  std::vector<Sector> sectors;
  UniformKappa distribution;
  Linkage linkage;
  std::uint64_t seed = 0;
  double Y1 = 0.0;
  bool solved = false;

  int size() const { return static_cast<int>(sectors.size()); }
};

struct CascadeOptions {
  double eps = 1e-9;
  int threads = 1;
  InvestmentOptions solver{64, 400};
};

// Draws kappa0 for `count` copies of `base`; sector s uses substream s of seed.
SectorEnsemble make_ensemble(const MarketPrimitives& base, int count, UniformKappa dist, Linkage linkage,
                             std::uint64_t seed);

// Solves every sector at its current kappa and records Y1.
void solve_ensemble(SectorEnsemble& ens, const CascadeOptions& opts = {});

// Mean over sectors of f* rho(x*); failed sectors contribute 0.
double aggregate_output(const SectorEnsemble& ens);

struct CascadeStep {
  int step = 0;
  int surviving = 0;
  int failed = 0;  // failures during this step
  double Y = 0.0;
};

struct CascadeTrajectory {
  std::vector<CascadeStep> steps;  // steps[0] is the pre-shock state
  int initial_failures = 0;
  int total_failures = 0;          // productive before the shock, failed after
  bool full_collapse = false;
};

// Applies an infinitesimal shock and iterates failures until a step removes
// nobody. Solves the ensemble first if needed; leaves it in its final state.
CascadeTrajectory run_cascade(SectorEnsemble& ens, const CascadeOptions& opts = {});

struct FragilityCensus {
  int fragile = 0;
  int robust = 0;
  int unproductive = 0;  // includes failed sectors
  int simple = 0;        // m < 2: never fragile, not solved
};

FragilityCensus fragility_census(const SectorEnsemble& ens, const CascadeOptions& opts = {});

}  // namespace fraglab
