#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraglab/cascade.hpp"
#include "fraglab/equilibrium.hpp"
#include "fraglab/heterogeneous.hpp"

namespace fraglab::cli {

enum class Kind { Reliability, Critical, Planner, Equilibrium, Sweep, Het, MonteCarlo, Cascade };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);  // throws InvalidArgument("kind", ...)

struct SweepSpec {
  double kappa_min = 1.0;
  double kappa_max = 2.0;
  double fbar_min = 0.0;
  double fbar_max = 1.0;
};

struct HetShockSpec {
  std::string product;
  std::string input;
  double eps = 1e-2;
};

struct MonteCarloSpec {
  std::string mode = "tree";  // tree | population
  long trials = 100000;
  int tiers = 7;
  int firms_per_product = 1000;
  int products = 0;
  int rounds = 0;
};

struct CascadeSpec {
  int sectors = 100;
  UniformKappa kappa{1.22, 4.0};
  double theta = 1.0;
  double eps = 1e-9;
};

struct Scenario {
  Kind kind = Kind::Reliability;
  MarketPrimitives prim;
  double x = 0.5;
  int tiers = 0;      // reliability curves: also emit rho_T when positive
  double tau = 0.0;   // reliability curves: also emit rho_tau when positive
  int grid = 1000;
  std::optional<SweepSpec> sweep;
  HeterogeneousEconomy economy;
  std::vector<double> pins;
  std::optional<HetShockSpec> shock;
  MonteCarloSpec montecarlo;
  CascadeSpec cascade;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;  // empty writes to stdout
};

// Decodes and validates a scenario. `fallback_kind` is used when the document
// has no "kind". Errors are InvalidArgument with a dotted field path.
Scenario parse_scenario(const nlohmann::json& doc, std::optional<Kind> fallback_kind = std::nullopt);
Scenario parse_scenario_file(const std::string& path, std::optional<Kind> fallback_kind = std::nullopt);

// Checks everything the target module would reject before dispatch.
void validate_scenario(const Scenario& sc);

nlohmann::json to_json(const Scenario& sc);

}  // namespace fraglab::cli
