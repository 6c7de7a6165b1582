#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fraglab/error.hpp"

namespace {

using fraglab::cli::Command;
using nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid, threads, m, n, tiers;
  std::optional<double> kappa, x;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Scenario JSON file")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Output path (default: stdout)");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--grid", f.grid, "Number of grid points");
  sub->add_option("--threads", f.threads, "Worker threads (fallback: FRAGLAB_THREADS)");
  sub->add_option("--m", f.m, "Inputs per product");
  sub->add_option("--n", f.n, "Potential suppliers per input");
  sub->add_option("--kappa", f.kappa, "Productivity kappa");
  sub->add_option("--x", f.x, "Relationship strength");
  sub->add_option("--tiers", f.tiers, "Supply-tree depth");
}

json load_document(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw fraglab::InvalidArgument("config", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw fraglab::InvalidArgument("config", std::string("malformed JSON: ") + e.what());
  }
}

// Flags override file values, which override built-in defaults.
fraglab::cli::Scenario build_scenario(Command cmd, const Flags& f) {
  json doc = load_document(f.config);
  if (!doc.is_object()) throw fraglab::InvalidArgument("config", "expected a JSON object");
  const fraglab::cli::Kind kind = fraglab::cli::kind_of(cmd);
  if (doc.contains("kind") && doc["kind"].is_string() && doc["kind"] != fraglab::cli::to_string(kind))
    throw fraglab::InvalidArgument("kind", "scenario kind \"" + doc["kind"].get<std::string>() + "\" does not match " +
                                               fraglab::cli::command_name(cmd));
  if (f.out) doc["out"] = *f.out;
  if (f.seed) doc["seed"] = *f.seed;
  if (f.grid) doc["grid"] = *f.grid;
  if (f.m) doc["m"] = *f.m;
  if (f.n) doc["n"] = *f.n;
  if (f.x) doc["x"] = *f.x;
  if (f.kappa) {
    if (!doc.contains("profit")) doc["profit"] = json::object();
    doc["profit"]["kappa"] = *f.kappa;
  }
  if (f.tiers) {
    if (cmd == Command::MonteCarlo) {
      if (!doc.contains("montecarlo")) doc["montecarlo"] = json::object();
      doc["montecarlo"]["tiers"] = *f.tiers;
    } else {
      doc["tiers"] = *f.tiers;
    }
  }
  if (f.threads) {
    doc["threads"] = *f.threads;
  } else if (const char* env = std::getenv("FRAGLAB_THREADS")) {
    try {
      doc["threads"] = std::stoi(env);
    } catch (const std::exception&) {
      throw fraglab::InvalidArgument("FRAGLAB_THREADS", "expected an integer");
    }
  }
  return fraglab::cli::parse_scenario(doc, kind);
}

const char* describe(Command c) {
  switch (c) {
    case Command::Reliability: return "Reliability curve rho(x) as CSV";
    case Command::CriticalPoint: return "Critical strength and reliability";
    case Command::Planner: return "Planner optimum for one kappa";
    case Command::Equilibrium: return "Entry equilibrium, regime and shock responses";
    case Command::SweepKappa: return "Equilibria over a kappa range as CSV";
    case Command::SweepEntry: return "Investment equilibria over an entry range as CSV";
    case Command::HetSolve: return "Heterogeneous network equilibrium";
    case Command::HetShock: return "Shock one product of a heterogeneous equilibrium";
    case Command::MonteCarlo: return "Sampled tree and population reliability";
    case Command::Cascade: return "Multi-sector cascade trajectory";
  }
  return "";
}

int fail(const std::string& type, const std::string& field, const std::string& message, int code) {
  std::cerr << fraglab::cli::error_record(type, field, message).dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply-network fragility laboratory"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<Command> chosen;
  for (Command c : {Command::Reliability, Command::CriticalPoint, Command::Planner, Command::Equilibrium,
                    Command::SweepKappa, Command::SweepEntry, Command::HetSolve, Command::HetShock,
                    Command::MonteCarlo, Command::Cascade}) {
    CLI::App* sub = app.add_subcommand(fraglab::cli::command_name(c), describe(c));
    add_flags(sub, flags);
    sub->callback([&chosen, c] { chosen = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", "", e.what(), 2);
  }

  try {
    const fraglab::cli::Scenario sc = build_scenario(*chosen, flags);
    const std::string text = fraglab::cli::dispatch(*chosen, sc);
    if (sc.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(sc.out, std::ios::binary);
      if (!out) return fail("io", "out", "cannot write " + sc.out, 1);
      out << text;
    }
  } catch (const fraglab::InvalidArgument& e) {
    return fail("invalid_argument", e.field(), e.what(), 2);
  } catch (const fraglab::SolverError& e) {
    return fail("solver", "", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("internal", "", e.what(), 1);
  }
  return 0;
}
