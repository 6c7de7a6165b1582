#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fraglab/error.hpp"
#include "fraglab/heterogeneous.hpp"

using namespace fraglab;

namespace {

using Vec = std::vector<double>;

// Seven products a..g: {a,b,c,d} feed each other, {e,f,g} need a and each other.
HeterogeneousEconomy seven_products(const Vec& alpha, const Vec& beta) {
  HeterogeneousEconomy e;
  e.products = {"a", "b", "c", "d", "e", "f", "g"};
  const std::vector<std::vector<int>> in = {{0, 1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2},
                                            {0, 5, 6},    {0, 4, 6}, {0, 4, 5}};
  for (int i = 0; i < 7; ++i) {
    std::vector<InputEdge> row;
    for (int j : in[i]) row.push_back({j, i < 2 ? 3 : 2, 1.0, 0.0});
    e.inputs.push_back(row);
  }
  e.alpha = alpha;
  e.beta = beta;
  return e;
}

HeterogeneousEconomy example_one() {
  return seven_products({40, 30, 15, 10, 3.5, 3, 2.8}, {1, 1, 1, 1, 0.3, 0.4, 0.5});
}
const Vec kPinsOne = {0.8873, 0.8773, 0.8673, 0.8573, 0.7573, 0.7473, 0.7373};

HeterogeneousEconomy example_two() { return seven_products({4, 5, 6, 7, 10, 15, 20}, {10, 4, 0.2, 0.2, 1, 1, 1}); }
const Vec kPinsTwo = {0.7965, 0.8065, 0.8165, 0.8265, 0.8965, 0.9065, 0.9165};

// Single strongly connected product ring with identical links.
HeterogeneousEconomy uniform_ring(int products, int m, int n) {
  HeterogeneousEconomy e;
  for (int i = 0; i < products; ++i) {
    e.products.push_back(std::string(1, static_cast<char>('p' + i)));
    std::vector<InputEdge> row;
    for (int k = 0; k < m; ++k) row.push_back({(i + k) % products, n, 1.0, 0.0});
    e.inputs.push_back(row);
  }
  return e;
}

StrengthMatrix filled(const HeterogeneousEconomy& e, double x) {
  StrengthMatrix X(e.size(), Vec(e.size(), 0.0));
  for (int i = 0; i < e.size(); ++i)
    for (const auto& edge : e.inputs[i]) X[i][edge.input] = x;
  return X;
}

void check_close(const Vec& got, const Vec& want, double tol, int first = 0, int last = -1) {
  if (last < 0) last = static_cast<int>(want.size());
  for (int i = first; i < last; ++i) {
    CAPTURE(i);
    CHECK(std::abs(got[i] - want[i]) <= tol);
  }
}

}  // namespace

TEST_CASE("vector reliability map") {
  const HeterogeneousEconomy e = example_one();
  const Vec ones(7, 1.0);
  check_close(het_reliability_map(e, filled(e, 1.0), ones), ones, 1e-15);

  StrengthMatrix X = filled(e, 0.9);
  X[4][5] = 0.0;
  const Vec out = het_reliability_map(e, X, Vec(7, 0.8));
  CHECK(out[4] == 0.0);
  // Product b: three inputs with n = 3.
  const double link = 1.0 - std::pow(1.0 - 0.9 * 0.8, 3);
  CHECK(out[1] == doctest::Approx(link * link * link).epsilon(1e-14));
}

TEST_CASE("het_rho is the largest fixed point") {
  const HeterogeneousEconomy e = example_one();
  for (double x : {0.7, 0.8, 0.95}) {
    const StrengthMatrix X = filled(e, x);
    const Vec r = het_rho(e, X);
    const Vec again = het_reliability_map(e, X, r);
    check_close(again, r, 1e-11);
    // Naive iteration from the all-ones vector.
    Vec it(7, 1.0);
    for (int k = 0; k < 200000; ++k) it = het_reliability_map(e, X, it);
    for (double& v : it)
      if (v < 1e-9) v = 0.0;
    check_close(r, it, 1e-9);
  }
  for (double v : het_rho(e, filled(e, 0.4))) CHECK(v == 0.0);
}

TEST_CASE("het_rho is monotone in each strength") {
  const HeterogeneousEconomy e = example_two();
  const HetEquilibrium eq = het_construct_equilibrium(e, kPinsTwo);
  const Vec base = het_rho(e, eq.X);
  for (int i = 0; i < 7; ++i)
    for (const auto& edge : e.inputs[i]) {
      StrengthMatrix X = eq.X;
      X[i][edge.input] = std::min(1.0, X[i][edge.input] + 0.02);
      const Vec up = het_rho(e, X);
      for (int k = 0; k < 7; ++k) CHECK(up[k] >= base[k] - 1e-12);
    }
}

TEST_CASE("no small fixed points") {
  for (const HeterogeneousEconomy& e : {example_one(), example_two()}) {
    const StrengthMatrix X = filled(e, 1.0);
    for (double scale : {1e-3, 5e-3, 9e-3}) {
      Vec r(7);
      for (int i = 0; i < 7; ++i) r[i] = scale * (0.5 + 0.5 * std::sin(i + 1.0)) + 1e-6;
      const Vec out = het_reliability_map(e, X, r);
      for (int i = 0; i < 7; ++i) CHECK(out[i] < r[i]);
    }
  }
}

TEST_CASE("critical xi") {
  const HeterogeneousEconomy ring = uniform_ring(4, 3, 2);
  const StrengthFunction identity = [](int, int, double xi) { return xi; };
  CHECK(het_critical_xi(ring, identity) == doctest::Approx(critical_point({3, 2}).x_crit).epsilon(1e-6));
  CHECK(het_critical_xi(uniform_ring(3, 2, 1), identity) == doctest::Approx(1.0).epsilon(1e-6));

  // Dense xi grid on the seven-product graph.
  const HeterogeneousEconomy e = example_one();
  const double xi = het_critical_xi(e, identity);
  double first = 1.0;
  for (int k = 0; k <= 10000; ++k) {
    const double v = k / 10000.0;
    const Vec r = het_rho(e, filled(e, v));
    if (*std::max_element(r.begin(), r.end()) > 0.0) {
      first = v;
      break;
    }
  }
  CHECK(xi <= first + 1e-8);
  CHECK(first - xi <= 1e-4 + 1e-8);
}

TEST_CASE("ratio solve") {
  const HeterogeneousEconomy ring = uniform_ring(4, 3, 2);
  const Vec sym = het_ratio_solve(ring, Vec(4, 0.9), 0, 0.85);
  for (const auto& edge : ring.inputs[0]) CHECK(sym[edge.input] == doctest::Approx(0.85).epsilon(1e-10));

  const Vec r1 = {0.9926, 0.9928, 0.9387, 0.9307, 0.5384, 0.5262, 0.5145};
  const Vec row_a = het_ratio_solve(example_one(), r1, 0, 0.8873);
  check_close(row_a, {0.8873, 0.8872, 0.9315, 0.9385, 0, 0, 0}, 5e-4);

  const Vec r2 = {0.8837, 0.9132, 0.7653, 0.7756, 0.8778, 0.8865, 0.8951};
  const Vec row_e = het_ratio_solve(example_two(), r2, 4, 0.8965);
  check_close(row_e, {0.8965, 0, 0, 0, 0, 0.8947, 0.8894}, 5e-4);
}

TEST_CASE("construction reproduces the second example") {
  const HeterogeneousEconomy e = example_two();
  const HetEquilibrium eq = het_construct_equilibrium(e, kPinsTwo);
  const StrengthMatrix X = {{0.7965, 0.7792, 0.8735, 0.8663, 0, 0, 0}, {0.8065, 0, 0.8859, 0.8785, 0, 0, 0},
                            {0.8165, 0.8029, 0, 0.8681, 0, 0, 0},      {0.8265, 0.8124, 0.8855, 0, 0, 0, 0},
                            {0.8965, 0, 0, 0, 0, 0.8947, 0.8894},      {0.9065, 0, 0, 0, 0.9103, 0, 0.8992},
                            {0.9165, 0, 0, 0, 0.9204, 0.9146, 0}};
  for (int i = 0; i < 7; ++i) check_close(eq.X[i], X[i], 5e-4);
  check_close(eq.r, {0.8837, 0.9132, 0.7653, 0.7756, 0.8778, 0.8865, 0.8951}, 5e-4);
  check_close(eq.G, {3.7758, 3.9399, 1.9995, 2.0736, 2.6608, 2.7929, 2.9372}, 1e-3);
  check_close(eq.fbar, {0.0634, 0.2322, 0.8712, 0.9074, 0.8361, 0.9180, 0.9531}, 1e-3);
  check_close(eq.beta, {10, 4, 0.2, 0.2, 1.3613, 1.3580, 1.4345}, 1e-3);
  check_close(eq.gross_profit, {1.9590, 2.4942, 0.4978, 0.5446, 1.1381, 1.2466, 1.3673}, 1e-3);
  check_close(eq.net_profit, {1.3246, 1.5655, 0.3236, 0.3632, 0, 0, 0}, 1e-3);
  for (int i = 0; i < 7; ++i) CHECK(eq.regime[i] == (i < 4 ? Regime::Critical : Regime::Noncritical));
  CHECK(het_foc_residual(e, eq) < 1e-6);
}

TEST_CASE("construction reproduces the first example's core block") {
  const HeterogeneousEconomy e = example_one();
  const HetEquilibrium eq = het_construct_equilibrium(e, kPinsOne);
  const StrengthMatrix X = {{0.8873, 0.8872, 0.9315, 0.9385, 0, 0, 0},
                            {0.8773, 0, 0.9204, 0.9272, 0, 0, 0},
                            {0.8673, 0.8672, 0, 0.9084, 0, 0, 0},
                            {0.8573, 0.8572, 0.8915, 0, 0, 0, 0}};
  for (int i = 0; i < 4; ++i) check_close(eq.X[i], X[i], 5e-4);
  check_close(eq.r, {0.9926, 0.9928, 0.9387, 0.9307}, 5e-4, 0, 4);
  check_close(eq.G, {21.0836, 17.7538, 3.2818, 3.0451}, 1e-2, 0, 4);
  check_close(eq.fbar, {0.4764, 0.4112, 0.8322, 0.7473}, 1e-3, 0, 4);
  check_close(eq.net_profit, {0, 0, 0, 0}, 1e-12, 0, 4);
  for (int i = 0; i < 7; ++i) CHECK(eq.regime[i] == (i < 4 ? Regime::Noncritical : Regime::Critical));
  for (int i = 4; i < 7; ++i) CHECK(eq.net_profit[i] > 0.0);
  CHECK(het_foc_residual(e, eq) < 1e-6);
}

TEST_CASE("weakest-link analysis") {
  for (bool first : {true, false}) {
    const HeterogeneousEconomy e = first ? example_one() : example_two();
    const HetEquilibrium eq = het_construct_equilibrium(e, first ? kPinsOne : kPinsTwo);
    const WeakestLinkReport w = weakest_link_analysis(e, eq);
    CHECK(w.regime_homogeneous);
    CHECK(w.components.size() == 2);
    for (const auto& comp : w.components)
      for (int i : comp) CHECK(eq.regime[i] == eq.regime[comp.front()]);
    if (first) {
      REQUIRE(w.failure_sets.count(4));
      CHECK(w.failure_sets.at(4) == std::vector<int>{4, 5, 6});
      CHECK(w.failure_sets.count(0) == 0);
    } else {
      REQUIRE(w.failure_sets.count(0));
      CHECK(w.failure_sets.at(0) == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    }
  }
}

TEST_CASE("shocks in the first example") {
  const HeterogeneousEconomy e = example_one();
  const HetEquilibrium eq = het_construct_equilibrium(e, kPinsOne);
  check_close(het_shock(e, eq, 4, 5, 0.0), eq.r, 1e-12);

  const Vec cluster = het_shock(e, eq, 4, 5, 0.01);
  check_close(cluster, eq.r, 1e-12, 0, 4);
  for (int i = 4; i < 7; ++i) CHECK(cluster[i] == 0.0);

  const Vec core = het_shock(e, eq, 0, 1, 0.01);
  CHECK(core[0] < eq.r[0]);
  CHECK(eq.r[0] - core[0] < 1e-2);
  for (int i = 4; i < 7; ++i) CHECK(core[i] == 0.0);
}

TEST_CASE("shocks in the second example") {
  const HeterogeneousEconomy e = example_two();
  const HetEquilibrium eq = het_construct_equilibrium(e, kPinsTwo);
  const Vec r = het_shock(e, eq, 4, 5, 0.01);
  CHECK(r[4] < eq.r[4]);
  CHECK(eq.r[4] - r[4] < 1e-2);
  check_close(r, eq.r, 1e-12, 0, 4);

  // At the critical surface itself a small shock to the core block brings
  // down every product.
  HetConstructOptions at_fold;
  at_fold.stop_at_target = false;
  const HetEquilibrium edge = het_construct_equilibrium(e, kPinsTwo, at_fold);
  CHECK(edge.path_s == doctest::Approx(edge.critical_s));
  for (double v : het_shock(e, edge, 0, 1, 0.01)) CHECK(v == 0.0);
}

TEST_CASE("economy validation") {
  HeterogeneousEconomy e = example_one();
  e.inputs[2][1].input = 9;
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
  CHECK_THROWS_AS(het_construct_equilibrium(example_one(), {0.9, 0.9}), InvalidArgument);
  CHECK(example_one().index_of("e") == 4);
  CHECK(example_one().index_of("z") == -1);
  CHECK(example_one().edge(4, 1) == nullptr);
}
