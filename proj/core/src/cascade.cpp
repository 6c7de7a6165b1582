#include "fraglab/cascade.hpp"

#include <cmath>

#include "detail.hpp"
#include "fraglab/error.hpp"
#include "fraglab/rng.hpp"

namespace fraglab {
namespace {

void solve_sector(Sector& s, const InvestmentOptions& solver) {
  if (!(s.kappa() > 0.0)) {
    s.eq = EntryEquilibrium{};
    return;
  }
  s.eq = entry_equilibrium(s.prim, solver);
}

template <class F>
void for_each_sector(SectorEnsemble& ens, int threads, F&& fn) {
  detail::parallel_chunks(ens.size(), ens.size(), threads, [&](int, long begin, long end) {
    for (long k = begin; k < end; ++k) fn(ens.sectors[k]);
  });
}

int productive_count(const SectorEnsemble& ens) {
  int n = 0;
  for (const auto& s : ens.sectors) n += s.productive();
  return n;
}

}  // namespace

double Linkage::kappa(double kappa0, double Y, double Y1) const {
  if (theta == 0.0) return kappa0;
  if (!(Y1 > 0.0)) return kappa0;
  return kappa0 * std::pow(std::max(Y, 0.0) / Y1, theta);
}

SectorEnsemble make_ensemble(const MarketPrimitives& base, int count, UniformKappa dist, Linkage linkage,
                             std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("sectors", "must be positive");
  if (!(dist.lo > 0.0) || !(dist.hi >= dist.lo)) throw InvalidArgument("kappa", "need 0 < lo <= hi");
  if (!(linkage.theta >= 0.0)) throw InvalidArgument("theta", "must be >= 0");
  SectorEnsemble ens;
  ens.distribution = dist;
  ens.linkage = linkage;
  ens.seed = seed;
  ens.sectors.resize(count);
  for (int s = 0; s < count; ++s) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(s));
    Sector& sec = ens.sectors[s];
    sec.id = s;
    sec.kappa0 = dist.lo + (dist.hi - dist.lo) * rng.uniform();
    sec.prim = base.with_kappa(sec.kappa0);
  }
  return ens;
}

void solve_ensemble(SectorEnsemble& ens, const CascadeOptions& opts) {
  for (const auto& s : ens.sectors)
    if (s.prim.tech.m < 2) throw InvalidArgument("sectors", "cascades need m >= 2 in every sector");
  for_each_sector(ens, opts.threads, [&](Sector& s) {
    s.failed = false;
    solve_sector(s, opts.solver);
  });
  ens.Y1 = aggregate_output(ens);
  ens.solved = true;
}

double aggregate_output(const SectorEnsemble& ens) {
  if (ens.sectors.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : ens.sectors)
    if (s.productive()) sum += s.eq.output();
  return sum / ens.size();
}

CascadeTrajectory run_cascade(SectorEnsemble& ens, const CascadeOptions& opts) {
  if (!ens.solved) solve_ensemble(ens, opts);
  std::vector<bool> initially_productive(ens.size());
  for (int k = 0; k < ens.size(); ++k) initially_productive[k] = ens.sectors[k].productive();

  CascadeTrajectory traj;
  traj.steps.push_back({0, productive_count(ens), 0, aggregate_output(ens)});

  std::vector<char> fragile(ens.size());
  for (int step = 1; step <= ens.size() + 1; ++step) {
    // Fragile sectors fail under the shock.
    detail::parallel_chunks(ens.size(), ens.size(), opts.threads, [&](int, long begin, long end) {
      for (long k = begin; k < end; ++k) {
        const Sector& s = ens.sectors[k];
        fragile[k] = s.productive() && classify_fragility(s.eq, s.prim, ShockMode::ReoptimizedInvestment,
                                                           opts.eps) == Fragility::Fragile;
      }
    });
    int failed = 0;
    for (int k = 0; k < ens.size(); ++k) {
      if (!fragile[k]) continue;
      ens.sectors[k].failed = true;
      ++failed;
    }
    if (failed == 0) break;
    if (step == 1) traj.initial_failures = failed;

    // Survivors see the new aggregate output and re-solve entry and investment.
    const double Y = aggregate_output(ens);
    for_each_sector(ens, opts.threads, [&](Sector& s) {
      if (!s.productive()) return;
      s.prim = s.prim.with_kappa(ens.linkage.kappa(s.kappa0, Y, ens.Y1));
      solve_sector(s, opts.solver);
    });
    for (auto& s : ens.sectors) {
      if (!s.failed && s.eq.regime == Regime::Unproductive && initially_productive[s.id]) {
        s.failed = true;
        ++failed;
      }
    }
    traj.steps.push_back({step, productive_count(ens), failed, aggregate_output(ens)});
  }

  for (int k = 0; k < ens.size(); ++k)
    traj.total_failures += initially_productive[k] && !ens.sectors[k].productive();
  traj.full_collapse = productive_count(ens) == 0;
  return traj;
}

FragilityCensus fragility_census(const SectorEnsemble& ens, const CascadeOptions& opts) {
  FragilityCensus census;
  std::vector<int> kind(ens.size(), 0);  // 0 unproductive, 1 fragile, 2 robust, 3 simple
  detail::parallel_chunks(ens.size(), ens.size(), opts.threads, [&](int, long begin, long end) {
    for (long k = begin; k < end; ++k) {
      const Sector& s = ens.sectors[k];
      if (s.prim.tech.m < 2) {
        kind[k] = 3;
        continue;
      }
      if (s.failed) continue;
      EntryEquilibrium eq = s.eq;
      if (!ens.solved && s.kappa() > 0.0) eq = entry_equilibrium(s.prim, opts.solver);
      if (eq.regime == Regime::Unproductive) continue;
      kind[k] = classify_fragility(eq, s.prim, ShockMode::ReoptimizedInvestment, opts.eps) == Fragility::Fragile
                    ? 1
                    : 2;
    }
  });
  for (int v : kind) {
    if (v == 0) ++census.unproductive;
    if (v == 1) ++census.fragile;
    if (v == 2) ++census.robust;
    if (v == 3) ++census.simple;
  }
  return census;
}

}  // namespace fraglab
