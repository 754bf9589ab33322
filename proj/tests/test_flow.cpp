#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "relayopt/errors.hpp"
#include "relayopt/flow.hpp"
#include "relayopt/hypergraph.hpp"
#include "relayopt/scenario.hpp"
#include "support/gen.hpp"

using namespace relayopt;
using geom::Point;

namespace {

Scenario line_scenario(double mu, double nu) {
  return Scenario::make({0, 0}, {{2, 0}}, mu, nu, RateModel::low_snr(1.0, 2.0), Point{1, 0});
}

int active_paths(const FlowSolution& sol) {
  int n = 0;
  for (const auto& a : sol.allocations)
    if (a.flow > 1e-9 * std::max(1.0, sol.total_flow)) ++n;
  return n;
}

}  // namespace

TEST_CASE("midpoint relay doubles the reach") {
  auto sc = line_scenario(1.0, 1.0);
  auto sol = max_flow_at(sc);
  CHECK(sol.total_flow == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(active_paths(sol) == 1);
  CHECK(sol.residual_mu == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(sol.residual_nu == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(sol.total_power() == doctest::Approx(2.0).epsilon(1e-9));

  const PathAllocation* hop = nullptr;
  for (const auto& a : sol.allocations)
    if (a.flow > 0.5) hop = &a;
  REQUIRE(hop != nullptr);
  CHECK(hop->path.two_hop());
  CHECK(hop->source_power == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(hop->relay_power == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("surplus relay budget shows up as residual") {
  auto sc = line_scenario(1.0, 4.0);
  auto sol = max_flow_at(sc);
  CHECK(sol.total_flow == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.residual_nu == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.residual_mu == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("scarce relay budget splits the flow") {
  auto sc = line_scenario(1.0, 0.25);
  auto sol = max_flow_at(sc);
  CHECK(sol.total_flow == doctest::Approx(0.4375).epsilon(1e-9));
  CHECK(active_paths(sol) == 2);

  double direct_flow = 0.0, hop_flow = 0.0;
  for (const auto& a : sol.allocations) {
    if (a.path.two_hop())
      hop_flow += a.flow;
    else
      direct_flow += a.flow;
  }
  CHECK(hop_flow == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(direct_flow == doctest::Approx(0.1875).epsilon(1e-9));
  CHECK(sol.residual_mu == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(sol.residual_nu == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("direct transmission without a relay") {
  auto sc = Scenario::make({0, 0}, {{1, 0}, {2, 0}}, 2.0, 0.0, RateModel::low_snr(1.0, 2.0));
  auto sol = max_flow_at(sc);
  CHECK(sol.total_flow == doctest::Approx(0.5).epsilon(1e-9));  // g(2)/h(2)
  REQUIRE(active_paths(sol) == 1);
  for (const auto& a : sol.allocations) CHECK_FALSE(a.path.two_hop());

  auto cheap = min_cost_at(sc, 0.25);
  CHECK(cheap.total_power() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flow solution accounting holds up") {
  std::mt19937_64 rng(31415);
  for (int trial = 0; trial < 50; ++trial) {
    testsupport::GenOptions opt;
    opt.n = 1 + static_cast<int>(rng() % 4);
    opt.with_relay = (trial % 3) != 0;
    auto sc = testsupport::random_scenario(rng, opt);
    auto sol = max_flow_at(sc);

    CHECK(sol.total_flow > 0.0);
    CHECK(active_paths(sol) <= 2);

    double mu_used = 0.0, nu_used = 0.0, flow_sum = 0.0;
    for (const auto& a : sol.allocations) {
      mu_used += a.source_power;
      nu_used += a.relay_power;
      flow_sum += a.flow;
      // each hop sustains exactly the allocated flow
      double src_rate = a.path.source_arc.lambda * sc.model().g(a.source_power);
      CHECK(src_rate == doctest::Approx(a.flow).epsilon(1e-7));
      if (a.path.two_hop()) {
        double rel_rate = a.path.relay_arc->lambda * sc.model().g(a.relay_power);
        CHECK(rel_rate == doctest::Approx(a.flow).epsilon(1e-7));
      } else {
        CHECK(a.relay_power == 0.0);
      }
    }
    CHECK(mu_used + sol.residual_mu == doctest::Approx(sc.mu()).epsilon(1e-9));
    CHECK(nu_used + sol.residual_nu == doctest::Approx(sc.nu()).epsilon(1e-9));
    CHECK(flow_sum == doctest::Approx(sol.total_flow).epsilon(1e-9));
    CHECK(sol.residual_mu == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  }
}

TEST_CASE("brute force split confirms the maximum") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 25; ++trial) {
    testsupport::GenOptions opt;
    opt.n = 1 + static_cast<int>(rng() % 2);
    opt.with_relay = true;
    auto sc = testsupport::random_scenario(rng, opt);
    double exact = max_flow_at(sc).total_flow;
    double brute = oracle_max_flow(sc, 64);

    CHECK(exact >= brute - 1e-9 * std::max(1.0, brute));
    double worst_cut = 0.0;
    for (const auto& p : spanning_paths(sc)) worst_cut = std::max(worst_cut, path_mincut(sc, p));
    CHECK(brute >= exact - 2.5 * worst_cut / 64.0 - 1e-9);
  }
}

TEST_CASE("max flow is monotone in both budgets") {
  std::mt19937_64 rng(161803);
  for (int trial = 0; trial < 30; ++trial) {
    testsupport::GenOptions opt;
    opt.n = 1 + static_cast<int>(rng() % 4);
    opt.with_relay = true;
    auto sc = testsupport::random_scenario(rng, opt);
    double base = max_flow_at(sc).total_flow;
    double more_mu = max_flow_at(sc.with_powers(sc.mu() * 2.0, sc.nu())).total_flow;
    double more_nu = max_flow_at(sc.with_powers(sc.mu(), sc.nu() * 2.0)).total_flow;
    CHECK(more_mu >= base - 1e-12);
    CHECK(more_nu >= base - 1e-12);
  }
}

TEST_CASE("min cost examples on the line") {
  auto sc = line_scenario(1.0, 1.0);
  auto half = min_cost_at(sc, 0.5);
  CHECK(half.total_flow == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(half.total_power() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(half.residual_mu == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(half.residual_nu == doctest::Approx(0.5).epsilon(1e-9));
  REQUIRE(active_paths(half) == 1);
  for (const auto& a : half.allocations)
    if (a.flow > 0.25) {
      CHECK(a.path.two_hop());
      CHECK(a.source_power == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(a.relay_power == doctest::Approx(0.5).epsilon(1e-9));
    }

  auto full = min_cost_at(sc, 1.0);
  CHECK(full.total_power() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(full.total_flow == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("min cost edge targets") {
  auto sc = line_scenario(1.0, 1.0);

  auto zero = min_cost_at(sc, 0.0);
  CHECK(zero.total_flow == 0.0);
  CHECK(zero.total_power() == 0.0);

  auto neg = min_cost_at(sc, -2.0);
  CHECK(neg.total_power() == 0.0);

  CHECK_THROWS_AS(min_cost_at(sc, 1.5), Error);
  try {
    min_cost_at(sc, 1.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::target_infeasible);
  }

  // at the cap the solution uses at most the full budgets
  auto cap = min_cost_at(sc, max_flow_at(sc).total_flow);
  double mu_used = 0.0, nu_used = 0.0;
  for (const auto& a : cap.allocations) {
    mu_used += a.source_power;
    nu_used += a.relay_power;
  }
  CHECK(mu_used <= sc.mu() + 1e-9);
  CHECK(nu_used <= sc.nu() + 1e-9);
}

TEST_CASE("min cost is monotone and convex in the target") {
  std::mt19937_64 rng(5772);
  for (int trial = 0; trial < 20; ++trial) {
    testsupport::GenOptions opt;
    opt.n = 1 + static_cast<int>(rng() % 3);
    opt.with_relay = true;
    auto sc = testsupport::random_scenario(rng, opt);
    double cap = max_flow_at(sc).total_flow;

    std::vector<double> costs;
    for (int k = 0; k <= 10; ++k)
      costs.push_back(min_cost_at(sc, cap * k / 10.0).total_power());
    for (size_t k = 1; k < costs.size(); ++k)
      CHECK(costs[k] >= costs[k - 1] - 1e-9 * std::max(1.0, costs[k]));
    double scale = std::max(1.0, costs.back());
    for (size_t k = 1; k + 1 < costs.size(); ++k)
      CHECK(costs[k + 1] - 2.0 * costs[k] + costs[k - 1] >= -1e-7 * scale);
  }
}

TEST_CASE("grid scan cannot beat min cost") {
  std::mt19937_64 rng(424243);
  for (int trial = 0; trial < 12; ++trial) {
    testsupport::GenOptions opt;
    opt.n = 1 + static_cast<int>(rng() % 2);
    opt.with_relay = true;
    auto sc = testsupport::random_scenario(rng, opt);
    auto paths = spanning_paths(sc);
    double cap = max_flow_at(sc).total_flow;
    double target = 0.6 * cap;
    double exact = min_cost_at(sc, target).total_power();

    // distribute the target across up to three paths on a lattice
    double best = std::numeric_limits<double>::infinity();
    const int steps = 160;
    auto feasible_cost = [&](const std::vector<double>& flows) {
      double mu_used = 0.0, nu_used = 0.0;
      for (size_t j = 0; j < flows.size(); ++j) {
        if (flows[j] <= 0.0) continue;
        const RateModel& m = sc.model();
        mu_used += m.g_inv(flows[j] * m.h(paths[j].source_arc.reach));
        if (paths[j].two_hop())
          nu_used += m.g_inv(flows[j] * m.h(paths[j].relay_arc->reach));
      }
      if (mu_used > sc.mu() + 1e-12 || nu_used > sc.nu() + 1e-12)
        return std::numeric_limits<double>::infinity();
      return mu_used + nu_used;
    };
    if (paths.size() == 2) {
      for (int i = 0; i <= steps; ++i) {
        double f0 = target * i / steps;
        best = std::min(best, feasible_cost({f0, target - f0}));
      }
    } else {
      REQUIRE(paths.size() == 3);
      for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j) {
          double f0 = target * i / steps;
          double f1 = target * j / steps;
          best = std::min(best, feasible_cost({f0, f1, target - f0 - f1}));
        }
    }
    REQUIRE(std::isfinite(best));
    CHECK(exact <= best + 1e-9 * std::max(1.0, best));
    // the lattice should land close to the exact optimum as well
    CHECK(best <= exact + 0.05 * std::max(1.0, exact));
  }
}

TEST_CASE("small targets ride the cheapest path") {
  std::mt19937_64 rng(8675309);
  for (int trial = 0; trial < 20; ++trial) {
    testsupport::GenOptions opt;
    opt.n = 1 + static_cast<int>(rng() % 4);
    opt.with_relay = true;
    opt.alphas = {2.0, 3.0};
    auto sc = testsupport::random_scenario(rng, opt);

    // with linear g the cost is linear in flow, so a tiny target goes
    // entirely onto the path with the least power per unit flow
    double unit_best = std::numeric_limits<double>::infinity();
    for (const auto& p : spanning_paths(sc)) {
      double unit = sc.model().h(p.source_arc.reach);
      if (p.two_hop()) unit += sc.model().h(p.relay_arc->reach);
      unit_best = std::min(unit_best, unit);
    }
    double cap = max_flow_at(sc).total_flow;
    double f = 0.01 * cap;
    auto sol = min_cost_at(sc, f);
    CHECK(sol.total_power() == doctest::Approx(f * unit_best).epsilon(1e-6));
  }
}

TEST_CASE("for_each_split visits every composition") {
  std::vector<std::vector<int>> seen;
  for_each_split(4, 3, [&](std::span<const int> parts) {
    seen.emplace_back(parts.begin(), parts.end());
  });
  CHECK(seen.size() == 15);  // C(4 + 2, 2)
  for (const auto& parts : seen) {
    REQUIRE(parts.size() == 3);
    CHECK(parts[0] + parts[1] + parts[2] == 4);
    for (int v : parts) CHECK(v >= 0);
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());

  int count_zero = 0;
  for_each_split(0, 2, [&](std::span<const int>) { ++count_zero; });
  CHECK(count_zero == 1);
}
