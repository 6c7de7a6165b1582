#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fraglab/error.hpp"
#include "fraglab/montecarlo.hpp"
#include "fraglab/planner.hpp"
#include "fraglab/reliability.hpp"

namespace fraglab::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }
  Csv& operator<<(double v) { return cell(fmt(v)); }
  Csv& operator<<(const std::string& s) { return cell(s); }
  void end_row() {
    out_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  Csv& cell(const std::string& s) {
    if (!fresh_) out_ << ',';
    out_ << s;
    fresh_ = false;
    return *this;
  }
  std::ostringstream out_;
  bool fresh_ = true;
};

double grid_point(double lo, double hi, int k, int points) {
  return points <= 1 ? lo : lo + (hi - lo) * k / (points - 1);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string run_reliability(const Scenario& sc) {
  const Technology& t = sc.prim.tech;
  Csv csv = sc.tiers > 0 && sc.tau > 0.0 ? Csv{"x", "rho", "rho_T", "rho_tau"}
            : sc.tiers > 0               ? Csv{"x", "rho", "rho_T"}
            : sc.tau > 0.0               ? Csv{"x", "rho", "rho_tau"}
                                         : Csv{"x", "rho"};
  for (int k = 0; k < sc.grid; ++k) {
    const double x = grid_point(0.0, 1.0, k, sc.grid);
    csv << x << rho(t, x);
    if (sc.tiers > 0) csv << rho_truncated(t, x, sc.tiers);
    if (sc.tau > 0.0) csv << rho_tau(t, x, sc.tau);
    csv.end_row();
  }
  return csv.str();
}

std::string run_critical(const Scenario& sc) {
  const CriticalPoint cp = critical_point(sc.prim.tech);
  json j;
  j["m"] = sc.prim.tech.m;
  j["n"] = sc.prim.tech.n;
  j["x_crit"] = cp.x_crit;
  j["r_crit"] = cp.r_crit;
  j["simple_threshold"] = simple_threshold(sc.prim.tech.n);
  return dump(j);
}

std::string run_planner(const Scenario& sc) {
  PlannerOptions opts;
  opts.xbar = sc.prim.xbar;
  const Technology& t = sc.prim.tech;
  if (sc.sweep) {
    Csv csv{"kappa", "x_sp", "r", "value", "interior"};
    for (int k = 0; k < sc.grid; ++k) {
      const double kappa = grid_point(sc.sweep->kappa_min, sc.sweep->kappa_max, k, sc.grid);
      const PlannerSolution s = planner_solve(t, sc.prim.cost, kappa, opts);
      csv << kappa << s.x_sp << s.r << s.value << std::string(s.interior ? "1" : "0");
      csv.end_row();
    }
    return csv.str();
  }
  const double kappa = sc.prim.profit.kappa();
  const PlannerSolution s = planner_solve(t, sc.prim.cost, kappa, opts);
  json j;
  j["scenario"] = to_json(sc);
  j["kappa"] = kappa;
  j["x_sp"] = s.x_sp;
  j["r"] = s.r;
  j["value"] = s.value;
  j["interior"] = s.interior;
  j["kappa_crit"] = kappa_crit_planner(t, sc.prim.cost, opts);
  j["warnings"] = s.warnings;
  return dump(j);
}

json equilibrium_json(const EntryEquilibrium& eq) {
  json j;
  j["regime"] = to_string(eq.regime);
  j["f_star"] = eq.f_star;
  j["x_star"] = eq.x_star;
  j["r"] = eq.r;
  j["output"] = eq.output();
  j["gross_profit"] = eq.gross_profit;
  j["marginal_net_profit"] = eq.marginal_net_profit;
  j["f_crit"] = optional_number(eq.f_crit);
  j["verified"] = eq.verified;
  j["notes"] = eq.notes;
  return j;
}

std::string run_equilibrium(const Scenario& sc) {
  const EntryEquilibrium eq = entry_equilibrium(sc.prim);
  const CriticalPoint cp = critical_point(sc.prim.tech);
  json j;
  j["scenario"] = to_json(sc);
  j["equilibrium"] = equilibrium_json(eq);
  j["x_crit"] = cp.x_crit;
  j["r_crit"] = cp.r_crit;
  j["kappa_lower"] = kappa_lower(sc.prim);
  j["kappa_upper"] = optional_number(kappa_upper(sc.prim));
  if (eq.regime != Regime::Unproductive) {
    for (ShockMode mode : {ShockMode::FixedInvestment, ShockMode::ReoptimizedInvestment})
      j["fragility"][to_string(mode)] = to_string(classify_fragility(eq, sc.prim, mode));
  }
  const PrimitivesReport rep = validate_primitives(sc.prim);
  j["primitive_notes"] = rep.notes;
  return dump(j);
}

std::string run_sweep_kappa(const Scenario& sc) {
  const SweepSpec sw = sc.sweep.value_or(SweepSpec{});
  Csv csv{"kappa", "fbar", "x", "rho", "gross_profit", "marginal_net_profit", "regime"};
  for (int k = 0; k < sc.grid; ++k) {
    const double kappa = grid_point(sw.kappa_min, sw.kappa_max, k, sc.grid);
    const EntryEquilibrium eq = entry_equilibrium(sc.prim.with_kappa(kappa));
    csv << kappa << eq.f_star << eq.x_star << eq.r << eq.gross_profit << eq.marginal_net_profit
        << to_string(eq.regime);
    csv.end_row();
  }
  return csv.str();
}

std::string run_sweep_entry(const Scenario& sc) {
  const SweepSpec sw = sc.sweep.value_or(SweepSpec{});
  Csv csv{"fbar", "H", "x", "r", "positive"};
  for (int k = 0; k < sc.grid; ++k) {
    const double f = grid_point(sw.fbar_min, sw.fbar_max, k, sc.grid);
    const InvestmentEquilibrium inv = investment_equilibrium(f, sc.prim);
    csv << f << entry_map_H(f, sc.prim) << inv.x_star << inv.r << std::string(inv.positive ? "1" : "0");
    csv.end_row();
  }
  return csv.str();
}

json names(const HeterogeneousEconomy& e, const std::vector<int>& idx) {
  json a = json::array();
  for (int i : idx) a.push_back(e.products[i]);
  return a;
}

std::string run_het_solve(const Scenario& sc) {
  const HeterogeneousEconomy& e = sc.economy;
  const HetEquilibrium eq = het_construct_equilibrium(e, sc.pins);
  const WeakestLinkReport wl = weakest_link_analysis(e, eq);
  json j;
  j["scenario"] = to_json(sc);
  j["products"] = e.products;
  j["X"] = eq.X;
  j["r"] = eq.r;
  j["pins"] = eq.pins;
  j["path_s"] = eq.path_s;
  j["critical_s"] = eq.critical_s;
  json regimes = json::array();
  for (Regime r : eq.regime) regimes.push_back(to_string(r));
  j["regime"] = regimes;
  j["component"] = eq.component;
  j["G"] = eq.G;
  j["alpha"] = eq.alpha;
  j["fbar"] = eq.fbar;
  j["beta"] = eq.beta;
  j["gross_profit"] = eq.gross_profit;
  j["net_profit"] = eq.net_profit;
  j["foc_residual"] = het_foc_residual(e, eq);
  j["regime_homogeneous"] = wl.regime_homogeneous;
  json fs = json::object();
  for (const auto& [i, set] : wl.failure_sets) fs[e.products[i]] = names(e, set);
  j["failure_sets"] = fs;
  return dump(j);
}

std::string run_het_shock(const Scenario& sc) {
  if (!sc.shock) throw InvalidArgument("shock", "required for het-shock");
  const HeterogeneousEconomy& e = sc.economy;
  const HetEquilibrium eq = het_construct_equilibrium(e, sc.pins);
  const int i = e.index_of(sc.shock->product), k = e.index_of(sc.shock->input);
  const std::vector<double> after = het_shock(e, eq, i, k, sc.shock->eps);
  json j;
  j["scenario"] = to_json(sc);
  j["products"] = e.products;
  j["edge"] = {sc.shock->product, sc.shock->input};
  j["eps"] = sc.shock->eps;
  j["r_before"] = eq.r;
  j["r_after"] = after;
  std::vector<std::string> collapsed;
  for (int p = 0; p < e.size(); ++p)
    if (eq.r[p] > 0.0 && after[p] == 0.0) collapsed.push_back(e.products[p]);
  j["collapsed"] = collapsed;
  return dump(j);
}

std::string run_montecarlo(const Scenario& sc) {
  const MonteCarloSpec& mc = sc.montecarlo;
  const Technology& t = sc.prim.tech;
  json j;
  j["scenario"] = to_json(sc);
  j["mode"] = mc.mode;
  j["x"] = sc.x;
  j["seed"] = sc.seed;
  j["trials"] = mc.trials;
  if (mc.mode == "tree") {
    const Estimate est = sample_tree_reliability(t, sc.x, mc.tiers, mc.trials, sc.seed, sc.threads);
    const double exact = rho_truncated(t, sc.x, mc.tiers);
    j["tiers"] = mc.tiers;
    j["estimate"] = est.value;
    j["std_error"] = est.std_error;
    j["rho_truncated"] = exact;
    j["z"] = est.std_error > 0.0 ? (est.value - exact) / est.std_error : 0.0;
  } else {
    PopulationOptions opts;
    opts.products = mc.products;
    opts.rounds = mc.rounds;
    opts.threads = sc.threads;
    const PopulationEstimate est =
        sample_population_reliability(t, sc.x, mc.firms_per_product, mc.trials, sc.seed, opts);
    j["firms_per_product"] = mc.firms_per_product;
    j["rounds"] = mc.rounds;
    j["fraction"] = est.fraction;
    j["std_error"] = est.std_error;
    j["rho"] = rho(t, sc.x);
  }
  return dump(j);
}

json census_json(const FragilityCensus& c) {
  return {{"fragile", c.fragile}, {"robust", c.robust}, {"unproductive", c.unproductive}, {"simple", c.simple}};
}

std::string run_cascade(const Scenario& sc) {
  const CascadeSpec& cs = sc.cascade;
  CascadeOptions opts;
  opts.eps = cs.eps;
  opts.threads = sc.threads;
  SectorEnsemble ens = make_ensemble(sc.prim, cs.sectors, cs.kappa, Linkage{cs.theta}, sc.seed);
  solve_ensemble(ens, opts);
  const FragilityCensus before = fragility_census(ens, opts);
  const CascadeTrajectory traj = run_cascade(ens, opts);

  json j;
  j["scenario"] = to_json(sc);
  j["kappa_lower"] = kappa_lower(sc.prim);
  j["kappa_upper"] = optional_number(kappa_upper(sc.prim));
  j["Y1"] = ens.Y1;
  j["census"] = census_json(before);
  json steps = json::array();
  for (const auto& s : traj.steps)
    steps.push_back({{"step", s.step}, {"surviving", s.surviving}, {"failed", s.failed}, {"Y", s.Y}});
  j["trajectory"] = steps;
  j["initial_failures"] = traj.initial_failures;
  j["total_failures"] = traj.total_failures;
  j["full_collapse"] = traj.full_collapse;
  json sectors = json::array();
  for (const auto& s : ens.sectors)
    sectors.push_back({{"id", s.id}, {"kappa0", s.kappa0}, {"kappa", s.kappa()}, {"failed", s.failed},
                       {"regime", to_string(s.eq.regime)}});
  j["sectors"] = sectors;
  return dump(j);
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::Reliability: return "reliability";
    case Command::CriticalPoint: return "critical-point";
    case Command::Planner: return "planner";
    case Command::Equilibrium: return "equilibrium";
    case Command::SweepKappa: return "sweep-kappa";
    case Command::SweepEntry: return "sweep-entry";
    case Command::HetSolve: return "het-solve";
    case Command::HetShock: return "het-shock";
    case Command::MonteCarlo: return "montecarlo";
    case Command::Cascade: return "cascade";
  }
  return "?";
}

Kind kind_of(Command c) {
  switch (c) {
    case Command::Reliability: return Kind::Reliability;
    case Command::CriticalPoint: return Kind::Critical;
    case Command::Planner: return Kind::Planner;
    case Command::Equilibrium: return Kind::Equilibrium;
    case Command::SweepKappa:
    case Command::SweepEntry: return Kind::Sweep;
    case Command::HetSolve:
    case Command::HetShock: return Kind::Het;
    case Command::MonteCarlo: return Kind::MonteCarlo;
    case Command::Cascade: return Kind::Cascade;
  }
  return Kind::Reliability;
}

std::string dispatch(Command c, const Scenario& sc) {
  validate_scenario(sc);
  switch (c) {
    case Command::Reliability: return run_reliability(sc);
    case Command::CriticalPoint: return run_critical(sc);
    case Command::Planner: return run_planner(sc);
    case Command::Equilibrium: return run_equilibrium(sc);
    case Command::SweepKappa: return run_sweep_kappa(sc);
    case Command::SweepEntry: return run_sweep_entry(sc);
    case Command::HetSolve: return run_het_solve(sc);
    case Command::HetShock: return run_het_shock(sc);
    case Command::MonteCarlo: return run_montecarlo(sc);
    case Command::Cascade: return run_cascade(sc);
  }
  throw InvalidArgument("command", "unknown");
}

json error_record(const std::string& type, const std::string& field, const std::string& message) {
  json e = {{"type", type}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  return {{"error", e}};
}

}  // namespace fraglab::cli
