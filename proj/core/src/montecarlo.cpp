#include "fraglab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail.hpp"
#include "fraglab/error.hpp"
#include "fraglab/rng.hpp"

namespace fraglab {

int FiniteSupplyNetwork::add_firm(int product) {
  product_of.push_back(product);
  slots.emplace_back();
  return size() - 1;
}

void FiniteSupplyNetwork::add_slot(int firm, int product, std::vector<SupplyLink> links) {
  if (firm < 0 || firm >= size()) throw InvalidArgument("firm", "index out of range");
  slots[firm].push_back(InputSlot{product, std::move(links)});
}

void FiniteSupplyNetwork::validate() const {
  if (slots.size() != product_of.size()) throw InvalidArgument("slots", "one slot list per firm required");
  for (int f = 0; f < size(); ++f) {
    for (const auto& slot : slots[f]) {
      for (const auto& link : slot.links) {
        if (link.supplier < 0 || link.supplier >= size())
          throw InvalidArgument("supplier", "firm " + std::to_string(f) + " links to unknown firm");
        if (product_of[link.supplier] != slot.product)
          throw InvalidArgument("supplier",
                                "firm " + std::to_string(f) + " sources an input from the wrong product");
      }
    }
  }
}

int FunctionalSet::count() const { return static_cast<int>(std::count(functional.begin(), functional.end(), true)); }

namespace {

struct Dependent {
  int firm;
  int slot;
};

// Stage-synchronous removal; stops after max_stages stages when positive.
FunctionalSet remove_synchronously(const FiniteSupplyNetwork& net, int max_stages) {
  const int N = net.size();
  std::vector<std::vector<int>> alive_links(N);
  std::vector<std::vector<Dependent>> dependents(N);
  for (int f = 0; f < N; ++f) {
    alive_links[f].assign(net.slots[f].size(), 0);
    for (int s = 0; s < static_cast<int>(net.slots[f].size()); ++s) {
      for (const auto& link : net.slots[f][s].links) {
        if (!link.operational) continue;
        ++alive_links[f][s];
        dependents[link.supplier].push_back({f, s});
      }
    }
  }

  FunctionalSet out;
  out.functional.assign(N, true);
  out.removal_stage.assign(N, 0);

  std::vector<int> frontier;
  std::vector<bool> queued(N, false);
  for (int f = 0; f < N; ++f) {
    if (std::find(alive_links[f].begin(), alive_links[f].end(), 0) != alive_links[f].end()) {
      frontier.push_back(f);
      queued[f] = true;
    }
  }

  int stage = 0;
  while (!frontier.empty() && (max_stages <= 0 || stage < max_stages)) {
    ++stage;
    for (int f : frontier) {
      out.functional[f] = false;
      out.removal_stage[f] = stage;
    }
    std::vector<int> next;
    for (int f : frontier) {
      for (const auto& d : dependents[f]) {
        if (--alive_links[d.firm][d.slot] == 0 && !queued[d.firm]) {
          queued[d.firm] = true;
          next.push_back(d.firm);
        }
      }
    }
    frontier = std::move(next);
  }
  out.stages = stage;
  return out;
}

bool has_live_supplier(const InputSlot& slot, const std::vector<bool>& alive) {
  for (const auto& link : slot.links)
    if (link.operational && alive[link.supplier]) return true;
  return false;
}

bool supported(const FiniteSupplyNetwork& net, int f, const std::vector<bool>& alive) {
  for (const auto& slot : net.slots[f])
    if (!has_live_supplier(slot, alive)) return false;
  return true;
}

// Root of a supply tree with `level` sourcing tiers below it; the bottom tier
// needs no inputs.
bool tree_root_functional(const Technology& t, double x, int level, SplitMix64& rng) {
  if (level == 0) return true;
  for (int input = 0; input < t.m; ++input) {
    bool sourced = false;
    for (int k = 0; k < t.n && !sourced; ++k) {
      if (rng.bernoulli(x)) sourced = tree_root_functional(t, x, level - 1, rng);
    }
    if (!sourced) return false;
  }
  return true;
}

void check_sampling_inputs(const Technology& tech, double x, long trials) {
  validate(tech);
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("x", "must lie in [0, 1]");
  if (trials <= 0) throw InvalidArgument("trials", "must be positive");
}

constexpr int kChunks = 64;

}  // namespace

FunctionalSet maximal_functional_set(const FiniteSupplyNetwork& net) {
  net.validate();
  return remove_synchronously(net, 0);
}

FunctionalSet maximal_functional_set_sequential(const FiniteSupplyNetwork& net, const std::vector<int>& order) {
  net.validate();
  const int N = net.size();
  std::vector<bool> seen(N, false);
  for (int f : order) {
    if (f < 0 || f >= N || seen[f]) throw InvalidArgument("order", "must be a permutation of the firms");
    seen[f] = true;
  }
  if (static_cast<int>(order.size()) != N) throw InvalidArgument("order", "must be a permutation of the firms");

  FunctionalSet out;
  out.functional.assign(N, true);
  out.removal_stage.assign(N, 0);
  for (int sweep = 1;; ++sweep) {
    bool changed = false;
    for (int f : order) {
      if (out.functional[f] && !supported(net, f, out.functional)) {
        out.functional[f] = false;
        out.removal_stage[f] = sweep;
        changed = true;
      }
    }
    if (!changed) break;
    out.stages = sweep;
  }
  return out;
}

bool is_consistent(const FiniteSupplyNetwork& net, const std::vector<bool>& members) {
  if (static_cast<int>(members.size()) != net.size()) throw InvalidArgument("members", "size must match the network");
  for (int f = 0; f < net.size(); ++f)
    if (members[f] && !supported(net, f, members)) return false;
  return true;
}

Estimate sample_tree_reliability(const Technology& tech, double x, int tiers, long trials, std::uint64_t seed,
                                 int threads) {
  check_sampling_inputs(tech, x, trials);
  if (tiers < 1) throw InvalidArgument("tiers", "must be >= 1");

  std::vector<long> hits(kChunks, 0);
  detail::parallel_chunks(trials, kChunks, threads, [&](int c, long begin, long end) {
    long h = 0;
    for (long t = begin; t < end; ++t) {
      SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(t));
      h += tree_root_functional(tech, x, tiers - 1, rng);
    }
    hits[c] = h;
  });

  long total = 0;
  for (long h : hits) total += h;
  Estimate e;
  e.trials = trials;
  e.seed = seed;
  e.value = static_cast<double>(total) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
  return e;
}

FiniteSupplyNetwork sample_network(const Technology& tech, double x, int products, int firms_per_product,
                                   std::uint64_t seed) {
  validate(tech);
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("x", "must lie in [0, 1]");
  if (products < 1) throw InvalidArgument("products", "must be positive");
  if (tech.m > products) throw InvalidArgument("products", "must be at least m");
  if (firms_per_product < tech.n + 1) throw InvalidArgument("firms_per_product", "must exceed n");

  FiniteSupplyNetwork net;
  const int F = firms_per_product;
  for (int p = 0; p < products; ++p)
    for (int k = 0; k < F; ++k) net.add_firm(p);

  SplitMix64 rng(seed);
  std::vector<int> chosen;
  for (int f = 0; f < net.size(); ++f) {
    const int p = net.product_of[f];
    for (int j = 0; j < tech.m; ++j) {
      const int q = (p + j) % products;
      chosen.clear();
      while (static_cast<int>(chosen.size()) < tech.n) {
        const int s = q * F + static_cast<int>(rng.below(static_cast<std::uint64_t>(F)));
        if (s == f || std::find(chosen.begin(), chosen.end(), s) != chosen.end()) continue;
        chosen.push_back(s);
      }
      std::vector<SupplyLink> links;
      links.reserve(chosen.size());
      for (int s : chosen) links.push_back({s, rng.bernoulli(x)});
      net.add_slot(f, q, std::move(links));
    }
  }
  return net;
}

PopulationEstimate sample_population_reliability(const Technology& tech, double x, int firms_per_product,
                                                 long trials, std::uint64_t seed, const PopulationOptions& opts) {
  check_sampling_inputs(tech, x, trials);
  const int P = opts.products > 0 ? opts.products : tech.m;

  std::vector<std::vector<double>> per_trial(trials, std::vector<double>(P, 0.0));
  detail::parallel_chunks(trials, kChunks, opts.threads, [&](int, long begin, long end) {
    for (long t = begin; t < end; ++t) {
      const std::uint64_t net_seed = SplitMix64::stream(seed, static_cast<std::uint64_t>(t)).next();
      const FiniteSupplyNetwork net = sample_network(tech, x, P, firms_per_product, net_seed);
      const FunctionalSet fs = remove_synchronously(net, opts.rounds);
      for (int f = 0; f < net.size(); ++f)
        if (fs.functional[f]) per_trial[t][net.product_of[f]] += 1.0;
      for (double& v : per_trial[t]) v /= firms_per_product;
    }
  });

  PopulationEstimate out;
  out.trials = trials;
  out.seed = seed;
  out.fraction.assign(P, 0.0);
  out.std_error.assign(P, 0.0);
  for (int p = 0; p < P; ++p) {
    double sum = 0.0, sq = 0.0;
    for (long t = 0; t < trials; ++t) {
      sum += per_trial[t][p];
      sq += per_trial[t][p] * per_trial[t][p];
    }
    const double mean = sum / trials;
    out.fraction[p] = mean;
    if (trials > 1) {
      const double var = std::max(0.0, (sq - trials * mean * mean) / (trials - 1));
      out.std_error[p] = std::sqrt(var / trials);
    }
  }
  return out;
}

}  // namespace fraglab
