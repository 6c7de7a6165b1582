#pragma once

#include <string>
#include <vector>

#include "fraglab/cost.hpp"
#include "fraglab/reliability.hpp"

namespace fraglab {

struct PlannerSolution {
  double x_sp = 0.0;   // xbar when investing is not worthwhile
  double r = 0.0;      // rho(x_sp)
  double value = 0.0;  // kappa * r - c(x_sp - xbar), never negative
  bool interior = false;
  std::vector<std::string> warnings;
};

struct PlannerOptions {
  double xbar = 0.0;
  int grid = 10000;
};

// max over x of kappa * rho(x) - c(x - xbar), searched in r on [r_crit, 1].
PlannerSolution planner_solve(const Technology& tech, const CostModel& cost, double kappa,
                              const PlannerOptions& opts = {});

// Best value over the positive-reliability branch, which may be negative.
double planner_interior_value(const Technology& tech, const CostModel& cost, double kappa,
                              const PlannerOptions& opts = {});

// Supremum of kappa at which the planner chooses zero investment.
double kappa_crit_planner(const Technology& tech, const CostModel& cost, const PlannerOptions& opts = {});

}  // namespace fraglab
