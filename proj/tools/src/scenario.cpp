#include "scenario.hpp"

#include <fstream>
#include <limits>
#include <set>

#include "fraglab/error.hpp"

namespace fraglab::cli {

using nlohmann::json;

namespace {

const std::pair<Kind, const char*> kKindNames[] = {
    {Kind::Reliability, "reliability"}, {Kind::Critical, "critical"}, {Kind::Planner, "planner"},
    {Kind::Equilibrium, "equilibrium"}, {Kind::Sweep, "sweep"},       {Kind::Het, "het"},
    {Kind::MonteCarlo, "montecarlo"},   {Kind::Cascade, "cascade"},
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw InvalidArgument(path.empty() ? "scenario" : path, "expected an object");
  return j;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw InvalidArgument(join(path, key), "expected a number");
  return v->get<double>();
}

long long get_integer(const json& obj, const std::string& key, const std::string& path, long long fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw InvalidArgument(join(path, key), "expected an integer");
  return v->get<long long>();
}

int get_int(const json& obj, const std::string& key, const std::string& path, int fallback) {
  const long long v = get_integer(obj, key, path, fallback);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw InvalidArgument(join(path, key), "out of range");
  return static_cast<int>(v);
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw InvalidArgument(join(path, key), "expected a string");
  return v->get<std::string>();
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw InvalidArgument(join(path, it.key()), "unknown field");
}

void positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw InvalidArgument(field, "must be positive");
}

CostModel parse_cost(const json& j, double xbar) {
  require_object(j, "cost");
  reject_unknown(j, "cost", {"family", "gamma", "p"});
  const std::string family = get_string(j, "family", "cost", "power");
  const double gamma = get_number(j, "gamma", "cost", 2.0);
  positive(gamma, "cost.gamma");
  if (family == "power") {
    const double p = get_number(j, "p", "cost", 2.0);
    if (!(p >= 2.0)) throw InvalidArgument("cost.p", "must be >= 2");
    return CostModel::power(gamma, p);
  }
  if (family == "inada") {
    if (find(j, "p")) throw InvalidArgument("cost.p", "not used by the inada family");
    return CostModel::inada_rational(gamma, xbar);
  }
  throw InvalidArgument("cost.family", "expected \"power\" or \"inada\"");
}

GrossProfitModel parse_profit(const json& j) {
  require_object(j, "profit");
  reject_unknown(j, "profit", {"family", "kappa", "a", "b", "sigma", "lambda", "iota", "n"});
  const std::string family = get_string(j, "family", "profit", "linear");
  const double kappa = get_number(j, "kappa", "profit", 1.0);
  positive(kappa, "profit.kappa");
  if (family == "linear") {
    const double a = get_number(j, "a", "profit", 1.0), b = get_number(j, "b", "profit", 1.0);
    positive(a, "profit.a");
    positive(b, "profit.b");
    return GrossProfitModel::linear(kappa, a, b);
  }
  if (family == "ces") {
    const double sigma = get_number(j, "sigma", "profit", 2.0);
    const double lambda = get_number(j, "lambda", "profit", 0.5);
    const double iota = get_number(j, "iota", "profit", 0.5);
    const int n = get_int(j, "n", "profit", 1);
    if (!(sigma > 1.0)) throw InvalidArgument("profit.sigma", "must exceed 1");
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("profit.lambda", "must lie in (0, 1)");
    if (!(iota > 0.0 && iota < 1.0)) throw InvalidArgument("profit.iota", "must lie in (0, 1)");
    if (n < 1) throw InvalidArgument("profit.n", "must be >= 1");
    return GrossProfitModel::ces(kappa, sigma, lambda, iota, n);
  }
  throw InvalidArgument("profit.family", "expected \"linear\" or \"ces\"");
}

EntryModel parse_entry(const json& j) {
  require_object(j, "entry");
  reject_unknown(j, "entry", {"beta", "p", "intercept"});
  EntryModel e;
  e.beta = get_number(j, "beta", "entry", 1.0);
  e.p = get_number(j, "p", "entry", 1.0);
  e.intercept = get_number(j, "intercept", "entry", 0.0);
  positive(e.beta, "entry.beta");
  positive(e.p, "entry.p");
  if (!(e.intercept >= 0.0)) throw InvalidArgument("entry.intercept", "must be >= 0");
  return e;
}

void parse_economy(const json& j, Scenario& sc) {
  require_object(j, "economy");
  reject_unknown(j, "economy", {"products"});
  const json* products = find(j, "products");
  if (!products || !products->is_array() || products->empty())
    throw InvalidArgument("economy.products", "expected a non-empty array");

  HeterogeneousEconomy econ;
  for (std::size_t i = 0; i < products->size(); ++i) {
    const std::string path = "economy.products[" + std::to_string(i) + "]";
    const json& p = require_object((*products)[i], path);
    const std::string name = get_string(p, "name", path, "");
    if (name.empty()) throw InvalidArgument(join(path, "name"), "required");
    if (econ.index_of(name) >= 0) throw InvalidArgument(join(path, "name"), "duplicate product " + name);
    econ.products.push_back(name);
  }

  bool any_alpha = false, all_alpha = true, any_beta = false, all_beta = true;
  std::vector<double> alpha, beta;
  for (std::size_t i = 0; i < products->size(); ++i) {
    const std::string path = "economy.products[" + std::to_string(i) + "]";
    const json& p = (*products)[i];
    reject_unknown(p, path, {"name", "inputs", "n", "gamma", "xbar", "alpha", "beta", "pin"});
    const int n_default = get_int(p, "n", path, 2);
    const double gamma_default = get_number(p, "gamma", path, 1.0);
    const double xbar_default = get_number(p, "xbar", path, 0.0);
    const json* inputs = find(p, "inputs");
    if (!inputs || !inputs->is_array() || inputs->empty())
      throw InvalidArgument(join(path, "inputs"), "expected a non-empty array");
    std::vector<InputEdge> edges;
    for (std::size_t k = 0; k < inputs->size(); ++k) {
      const std::string epath = join(path, "inputs") + "[" + std::to_string(k) + "]";
      const json& e = (*inputs)[k];
      InputEdge edge{0, n_default, gamma_default, xbar_default};
      std::string input;
      if (e.is_string()) {
        input = e.get<std::string>();
      } else {
        require_object(e, epath);
        reject_unknown(e, epath, {"input", "n", "gamma", "xbar"});
        input = get_string(e, "input", epath, "");
        edge.n = get_int(e, "n", epath, n_default);
        edge.gamma = get_number(e, "gamma", epath, gamma_default);
        edge.xbar = get_number(e, "xbar", epath, xbar_default);
      }
      edge.input = econ.index_of(input);
      if (edge.input < 0) throw InvalidArgument(epath, "unknown product \"" + input + "\"");
      if (edge.n < 1) throw InvalidArgument(join(epath, "n"), "must be >= 1");
      positive(edge.gamma, join(epath, "gamma"));
      if (!(edge.xbar >= 0.0 && edge.xbar < 1.0)) throw InvalidArgument(join(epath, "xbar"), "must lie in [0, 1)");
      edges.push_back(edge);
    }
    econ.inputs.push_back(std::move(edges));

    if (find(p, "alpha")) {
      any_alpha = true;
      alpha.push_back(get_number(p, "alpha", path, 0.0));
      positive(alpha.back(), join(path, "alpha"));
    } else {
      all_alpha = false;
    }
    if (find(p, "beta")) {
      any_beta = true;
      beta.push_back(get_number(p, "beta", path, 0.0));
      positive(beta.back(), join(path, "beta"));
    } else {
      all_beta = false;
    }
    const double pin = get_number(p, "pin", path, std::numeric_limits<double>::quiet_NaN());
    if (!(pin > 0.0 && pin <= 1.0)) throw InvalidArgument(join(path, "pin"), "required, in (0, 1]");
    sc.pins.push_back(pin);
  }
  if (any_alpha && !all_alpha) throw InvalidArgument("economy.products", "alpha must be given for all products or none");
  if (any_beta && !all_beta) throw InvalidArgument("economy.products", "beta must be given for all products or none");
  econ.alpha = alpha;
  econ.beta = beta;
  econ.validate();
  sc.economy = std::move(econ);
}

}  // namespace

std::string to_string(Kind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

Kind kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : kKindNames)
    if (s == name) return kind;
  throw InvalidArgument("kind", "unknown kind \"" + s + "\"");
}

Scenario parse_scenario(const json& doc, std::optional<Kind> fallback_kind) {
  require_object(doc, "");
  reject_unknown(doc, "", {"kind", "m", "n", "cost", "profit", "entry", "xbar", "x", "tiers", "tau", "grid", "sweep",
                           "economy", "shock", "montecarlo", "cascade", "seed", "threads", "out"});
  Scenario sc;
  if (const json* k = find(doc, "kind")) {
    if (!k->is_string()) throw InvalidArgument("kind", "expected a string");
    sc.kind = kind_from_string(k->get<std::string>());
  } else if (fallback_kind) {
    sc.kind = *fallback_kind;
  } else {
    throw InvalidArgument("kind", "required");
  }

  sc.prim.tech.m = get_int(doc, "m", "", sc.prim.tech.m);
  sc.prim.tech.n = get_int(doc, "n", "", sc.prim.tech.n);
  sc.prim.xbar = get_number(doc, "xbar", "", 0.0);
  if (!(sc.prim.xbar >= 0.0 && sc.prim.xbar < 1.0)) throw InvalidArgument("xbar", "must lie in [0, 1)");
  if (const json* c = find(doc, "cost")) sc.prim.cost = parse_cost(*c, sc.prim.xbar);
  if (const json* p = find(doc, "profit")) sc.prim.profit = parse_profit(*p);
  if (const json* e = find(doc, "entry")) sc.prim.entry = parse_entry(*e);

  sc.x = get_number(doc, "x", "", sc.x);
  sc.tiers = get_int(doc, "tiers", "", sc.tiers);
  sc.tau = get_number(doc, "tau", "", sc.tau);
  sc.grid = get_int(doc, "grid", "", sc.grid);
  sc.threads = get_int(doc, "threads", "", sc.threads);
  sc.out = get_string(doc, "out", "", "");
  if (const json* s = find(doc, "seed")) {
    if (!s->is_number_integer() || s->get<std::int64_t>() < 0)
      throw InvalidArgument("seed", "expected a non-negative integer");
    sc.seed = s->get<std::uint64_t>();
  }

  if (const json* s = find(doc, "sweep")) {
    require_object(*s, "sweep");
    reject_unknown(*s, "sweep", {"kappa_min", "kappa_max", "fbar_min", "fbar_max"});
    SweepSpec sw;
    sw.kappa_min = get_number(*s, "kappa_min", "sweep", sw.kappa_min);
    sw.kappa_max = get_number(*s, "kappa_max", "sweep", sw.kappa_max);
    sw.fbar_min = get_number(*s, "fbar_min", "sweep", sw.fbar_min);
    sw.fbar_max = get_number(*s, "fbar_max", "sweep", sw.fbar_max);
    sc.sweep = sw;
  }
  if (const json* e = find(doc, "economy")) parse_economy(*e, sc);
  if (const json* s = find(doc, "shock")) {
    require_object(*s, "shock");
    reject_unknown(*s, "shock", {"product", "input", "eps"});
    HetShockSpec sh;
    sh.product = get_string(*s, "product", "shock", "");
    sh.input = get_string(*s, "input", "shock", "");
    sh.eps = get_number(*s, "eps", "shock", sh.eps);
    sc.shock = sh;
  }
  if (const json* m = find(doc, "montecarlo")) {
    require_object(*m, "montecarlo");
    reject_unknown(*m, "montecarlo", {"mode", "trials", "tiers", "firms_per_product", "products", "rounds"});
    MonteCarloSpec& mc = sc.montecarlo;
    mc.mode = get_string(*m, "mode", "montecarlo", mc.mode);
    mc.trials = static_cast<long>(get_integer(*m, "trials", "montecarlo", mc.trials));
    mc.tiers = get_int(*m, "tiers", "montecarlo", mc.tiers);
    mc.firms_per_product = get_int(*m, "firms_per_product", "montecarlo", mc.firms_per_product);
    mc.products = get_int(*m, "products", "montecarlo", mc.products);
    mc.rounds = get_int(*m, "rounds", "montecarlo", mc.rounds);
  }
  if (const json* c = find(doc, "cascade")) {
    require_object(*c, "cascade");
    reject_unknown(*c, "cascade", {"sectors", "kappa_lo", "kappa_hi", "theta", "eps"});
    CascadeSpec& cs = sc.cascade;
    cs.sectors = get_int(*c, "sectors", "cascade", cs.sectors);
    cs.kappa.lo = get_number(*c, "kappa_lo", "cascade", cs.kappa.lo);
    cs.kappa.hi = get_number(*c, "kappa_hi", "cascade", cs.kappa.hi);
    cs.theta = get_number(*c, "theta", "cascade", cs.theta);
    cs.eps = get_number(*c, "eps", "cascade", cs.eps);
  }
  validate_scenario(sc);
  return sc;
}

Scenario parse_scenario_file(const std::string& path, std::optional<Kind> fallback_kind) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc, fallback_kind);
}

void validate_scenario(const Scenario& sc) {
  const Technology& t = sc.prim.tech;
  if (t.m < 1) throw InvalidArgument("m", "must be >= 1");
  if (t.n < 1) throw InvalidArgument("n", "must be >= 1");
  if (sc.grid < 2) throw InvalidArgument("grid", "must be >= 2");
  if (sc.threads < 1) throw InvalidArgument("threads", "must be >= 1");
  if (!(sc.x >= 0.0 && sc.x <= 1.0)) throw InvalidArgument("x", "must lie in [0, 1]");
  if (sc.tiers < 0) throw InvalidArgument("tiers", "must be >= 0");
  if (!(sc.tau >= 0.0 && sc.tau < 1.0)) throw InvalidArgument("tau", "must lie in [0, 1)");
  if (sc.sweep) {
    if (!(sc.sweep->kappa_min > 0.0 && sc.sweep->kappa_max >= sc.sweep->kappa_min))
      throw InvalidArgument("sweep.kappa_min", "need 0 < kappa_min <= kappa_max");
    if (!(sc.sweep->fbar_min >= 0.0 && sc.sweep->fbar_max <= 1.0 && sc.sweep->fbar_min <= sc.sweep->fbar_max))
      throw InvalidArgument("sweep.fbar_min", "need 0 <= fbar_min <= fbar_max <= 1");
  }

  switch (sc.kind) {
    case Kind::Critical:
    case Kind::Planner:
      if (t.m < 2) throw InvalidArgument("m", "must be >= 2");
      break;
    case Kind::Equilibrium:
    case Kind::Sweep: {
      const PrimitivesReport rep = validate_primitives(sc.prim);
      if (!rep.ok()) throw InvalidArgument("primitives", rep.violations.front());
      break;
    }
    case Kind::Het:
      if (sc.economy.products.empty()) throw InvalidArgument("economy", "required");
      if (sc.shock) {
        if (sc.economy.index_of(sc.shock->product) < 0) throw InvalidArgument("shock.product", "unknown product");
        const int i = sc.economy.index_of(sc.shock->product);
        const int j = sc.economy.index_of(sc.shock->input);
        if (j < 0 || !sc.economy.edge(i, j)) throw InvalidArgument("shock.input", "not an input of shock.product");
        if (!(sc.shock->eps >= 0.0)) throw InvalidArgument("shock.eps", "must be >= 0");
      }
      break;
    case Kind::MonteCarlo: {
      const MonteCarloSpec& mc = sc.montecarlo;
      if (mc.mode != "tree" && mc.mode != "population")
        throw InvalidArgument("montecarlo.mode", "expected \"tree\" or \"population\"");
      if (mc.trials < 1) throw InvalidArgument("montecarlo.trials", "must be positive");
      if (mc.tiers < 1) throw InvalidArgument("montecarlo.tiers", "must be >= 1");
      if (mc.firms_per_product <= t.n) throw InvalidArgument("montecarlo.firms_per_product", "must exceed n");
      if (mc.products != 0 && mc.products < t.m) throw InvalidArgument("montecarlo.products", "must be 0 or >= m");
      if (mc.rounds < 0) throw InvalidArgument("montecarlo.rounds", "must be >= 0");
      break;
    }
    case Kind::Cascade: {
      const CascadeSpec& cs = sc.cascade;
      if (cs.sectors < 1) throw InvalidArgument("cascade.sectors", "must be positive");
      if (!(cs.kappa.lo > 0.0)) throw InvalidArgument("cascade.kappa_lo", "must be positive");
      if (!(cs.kappa.hi >= cs.kappa.lo)) throw InvalidArgument("cascade.kappa_hi", "must be >= kappa_lo");
      if (!(cs.theta >= 0.0)) throw InvalidArgument("cascade.theta", "must be >= 0");
      if (!(cs.eps > 0.0)) throw InvalidArgument("cascade.eps", "must be positive");
      const PrimitivesReport rep = validate_primitives(sc.prim);
      if (!rep.ok()) throw InvalidArgument("primitives", rep.violations.front());
      break;
    }
    case Kind::Reliability:
      break;
  }
}

json to_json(const Scenario& sc) {
  json j;
  j["kind"] = to_string(sc.kind);
  j["m"] = sc.prim.tech.m;
  j["n"] = sc.prim.tech.n;
  j["xbar"] = sc.prim.xbar;

  const CostModel& c = sc.prim.cost;
  if (c.family() == CostModel::Family::Power)
    j["cost"] = {{"family", "power"}, {"gamma", c.gamma()}, {"p", c.exponent()}};
  else
    j["cost"] = {{"family", "inada"}, {"gamma", c.gamma()}};

  const GrossProfitModel& g = sc.prim.profit;
  if (g.family() == GrossProfitModel::Family::Linear)
    j["profit"] = {{"family", "linear"}, {"kappa", g.kappa()}, {"a", g.a()}, {"b", g.b()}};
  else
    j["profit"] = {{"family", "ces"},         {"kappa", g.kappa()}, {"sigma", g.sigma()},
                   {"lambda", g.lambda()},    {"iota", g.iota()},   {"n", g.ces_n()}};
  j["entry"] = {{"beta", sc.prim.entry.beta}, {"p", sc.prim.entry.p}, {"intercept", sc.prim.entry.intercept}};

  j["x"] = sc.x;
  j["tiers"] = sc.tiers;
  j["tau"] = sc.tau;
  j["grid"] = sc.grid;
  j["seed"] = sc.seed;
  if (sc.sweep)
    j["sweep"] = {{"kappa_min", sc.sweep->kappa_min},
                  {"kappa_max", sc.sweep->kappa_max},
                  {"fbar_min", sc.sweep->fbar_min},
                  {"fbar_max", sc.sweep->fbar_max}};

  if (!sc.economy.products.empty()) {
    json products = json::array();
    const HeterogeneousEconomy& e = sc.economy;
    for (int i = 0; i < e.size(); ++i) {
      json p;
      p["name"] = e.products[i];
      json inputs = json::array();
      for (const auto& edge : e.inputs[i])
        inputs.push_back({{"input", e.products[edge.input]}, {"n", edge.n}, {"gamma", edge.gamma}, {"xbar", edge.xbar}});
      p["inputs"] = inputs;
      if (!e.alpha.empty()) p["alpha"] = e.alpha[i];
      if (!e.beta.empty()) p["beta"] = e.beta[i];
      p["pin"] = sc.pins[i];
      products.push_back(p);
    }
    j["economy"] = {{"products", products}};
  }
  if (sc.shock) j["shock"] = {{"product", sc.shock->product}, {"input", sc.shock->input}, {"eps", sc.shock->eps}};

  const MonteCarloSpec& mc = sc.montecarlo;
  j["montecarlo"] = {{"mode", mc.mode},
                     {"trials", mc.trials},
                     {"tiers", mc.tiers},
                     {"firms_per_product", mc.firms_per_product},
                     {"products", mc.products},
                     {"rounds", mc.rounds}};
  const CascadeSpec& cs = sc.cascade;
  j["cascade"] = {{"sectors", cs.sectors},
                  {"kappa_lo", cs.kappa.lo},
                  {"kappa_hi", cs.kappa.hi},
                  {"theta", cs.theta},
                  {"eps", cs.eps}};
  return j;
}

}  // namespace fraglab::cli
