#pragma once

#include <cstdint>
#include <vector>

#include "fraglab/reliability.hpp"

namespace fraglab {

struct SupplyLink {
  int supplier = 0;
  bool operational = false;
};

// One required input of a firm and the potential suppliers it may use.
struct InputSlot {
  int product = 0;
  std::vector<SupplyLink> links;
};

// Firms with their products and, per required input, a list of potential
// suppliers. A firm with no slots needs no inputs.
struct FiniteSupplyNetwork {
  std::vector<int> product_of;
  std::vector<std::vector<InputSlot>> slots;

  int size() const { return static_cast<int>(product_of.size()); }
  int add_firm(int product);  // returns the new firm's index
  void add_slot(int firm, int product, std::vector<SupplyLink> links);
  void validate() const;
};

struct FunctionalSet {
  std::vector<bool> functional;
  std::vector<int> removal_stage;  // 0 for firms that stay functional
  int stages = 0;                  // number of stages that removed someone

  int count() const;
};

// Removes, stage by stage and simultaneously, every firm lacking an
// operational link to a surviving supplier for some input.
FunctionalSet maximal_functional_set(const FiniteSupplyNetwork& net);

// Same fixed point reached by removing firms one at a time in `order`
// (repeated sweeps). removal_stage holds the sweep number.
FunctionalSet maximal_functional_set_sequential(const FiniteSupplyNetwork& net, const std::vector<int>& order);

// Every member has, for each input, an operational link to another member.
bool is_consistent(const FiniteSupplyNetwork& net, const std::vector<bool>& members);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
};

// Root functionality frequency of depth-T random supply trees.
Estimate sample_tree_reliability(const Technology& tech, double x, int tiers, long trials, std::uint64_t seed,
                                 int threads = 1);

struct PopulationOptions {
  int products = 0;  // 0 means tech.m
  int rounds = 0;    // removal stages to run; 0 runs to the fixed point
  int threads = 1;
};

struct PopulationEstimate {
  std::vector<double> fraction;  // per product, averaged over trials
  std::vector<double> std_error;
  long trials = 0;
  std::uint64_t seed = 0;
};

// Product p needs products p, p+1, ..., p+m-1 (mod P); every firm draws n
// distinct suppliers per input, never itself.
FiniteSupplyNetwork sample_network(const Technology& tech, double x, int products, int firms_per_product,
                                   std::uint64_t seed);

PopulationEstimate sample_population_reliability(const Technology& tech, double x, int firms_per_product,
                                                 long trials, std::uint64_t seed, const PopulationOptions& opts = {});

}  // namespace fraglab
