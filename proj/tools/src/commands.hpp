#pragma once

#include <string>

#include "scenario.hpp"

namespace fraglab::cli {

enum class Command {
  Reliability,
  CriticalPoint,
  Planner,
  Equilibrium,
  SweepKappa,
  SweepEntry,
  HetSolve,
  HetShock,
  MonteCarlo,
  Cascade,
};

std::string command_name(Command c);
Kind kind_of(Command c);

// Runs the command and returns the rendered output: CSV for curves, JSON
// otherwise. Deterministic for a fixed scenario.
std::string dispatch(Command c, const Scenario& sc);

// Machine-readable error record written to stderr on failure.
nlohmann::json error_record(const std::string& type, const std::string& field, const std::string& message);

}  // namespace fraglab::cli
