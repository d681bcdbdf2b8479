#include "cgtree/pricing.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace cgtree;

namespace {

struct Instance {
  Dataset data;
  oracle::RandomMaster input;
};

Instance make_instance(std::mt19937_64& rng, int k, std::size_t rows, std::size_t per_node) {
  Instance inst{oracle::random_dataset(rng, rows, 3, 3), {}};
  inst.input = oracle::random_master_input(rng, inst.data, k, per_node);
  return inst;
}

}  // namespace

TEST_SUITE("pricing") {
  TEST_CASE("reduced costs agree with row-by-row routing") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 30; ++trial) {
      const int k = 1 + trial % 3;
      const auto inst = make_instance(rng, k, 20, 3);
      const auto m = build_master(inst.input.splits, paths_of_tree(inst.input.tree), inst.data, k);
      const auto y = oracle::random_duals(rng, m, 1.0);
      const PricingContext ctx(m, y);
      for (const auto& p : paths_of_tree(inst.input.tree))
        CHECK(ctx.reduced_cost(p) == doctest::Approx(oracle::reduced_cost(m, y, p)));
    }
  }

  TEST_CASE("exact enumeration finds the brute-force optimum") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 40; ++trial) {
      const int k = 2 + trial % 2;
      const auto inst = make_instance(rng, k, 18, 3);
      const auto m = build_master(inst.input.splits, paths_of_tree(inst.input.tree), inst.data, k);
      const auto y = oracle::random_duals(rng, m, 0.5);
      const PricingContext ctx(m, y);
      const auto& topo = m.topology();
      for (std::size_t l = 0; l < topo.n_leaves(); ++l) {
        const auto best = exact_enumerate_leaf(ctx, topo.leaf(l));
        for (int t = 0; t < 3; ++t) {
          const auto& b = best[static_cast<std::size_t>(t)];
          CHECK(b.reduced_cost == doctest::Approx(oracle::best_reduced_cost(m, y, topo.leaf(l), t)));
          CHECK(b.reduced_cost == doctest::Approx(oracle::reduced_cost(m, y, b.path)));
          CHECK_NOTHROW(validate_path(b.path, topo, 3));
        }
      }
    }
  }

  TEST_CASE("pricing integer program agrees with enumeration") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 2 + trial % 2;
      const auto inst = make_instance(rng, k, 14, 3);
      const auto m = build_master(inst.input.splits, paths_of_tree(inst.input.tree), inst.data, k);
      const auto y = oracle::random_duals(rng, m, 0.5);
      const PricingContext ctx(m, y);
      const auto leaf = m.topology().leaf(static_cast<std::size_t>(trial) % m.topology().n_leaves());
      const int t = trial % 3;
      const auto e = exact_enumerate(ctx, leaf, t);
      const auto q = milp_price(ctx, leaf, t);
      CHECK(q.proven_optimal);
      CHECK(std::abs(q.best.reduced_cost - e.reduced_cost) <= 1e-6);
      CHECK(q.best.reduced_cost == doctest::Approx(oracle::reduced_cost(m, y, q.best.path)));
    }
  }

  TEST_CASE("price_all returns one path per leaf and target") {
    std::mt19937_64 rng(64);
    const auto inst = make_instance(rng, 2, 20, 3);
    const auto m = build_master(inst.input.splits, paths_of_tree(inst.input.tree), inst.data, 2);
    const PricingContext ctx(m, oracle::random_duals(rng, m, 0.3));
    const auto r = price_all(ctx, PricingMode::exact_enum);
    CHECK(r.complete);
    CHECK(r.best.size() == 12);
    CHECK(r.best_per_leaf.size() == 4);
    double mx = -1e300;
    for (const auto& p : r.best) mx = std::max(mx, p.reduced_cost);
    CHECK(r.max_reduced_cost == doctest::Approx(mx));
  }
}

TEST_SUITE("invariants") {
  TEST_CASE("heuristic pool stays within capacity and emits valid new paths") {
    std::mt19937_64 rng(65);
    for (int trial = 0; trial < 10; ++trial) {
      const int k = 2 + trial % 2;
      const auto inst = make_instance(rng, k, 30, 6);
      const auto m = build_master(inst.input.splits, paths_of_tree(inst.input.tree), inst.data, k);
      HeuristicParams hp;
      hp.pool_capacity = 40;
      hp.columns_per_round = 10;
      HeuristicState state(hp, m.topology().n_leaves(), 99);
      std::set<DecisionPath> emitted_before;
      for (int round = 0; round < 25; ++round) {
        const PricingContext ctx(m, oracle::random_duals(rng, m, 0.2));
        const auto out = heuristic_generate(ctx, state, [&](const DecisionPath& p) { return emitted_before.contains(p); });
        CHECK(state.pool.size() <= hp.pool_capacity);
        CHECK(out.size() <= hp.columns_per_round);
        for (const auto& p : out) {
          CHECK(p.reduced_cost > 0);
          CHECK_NOTHROW(validate_path(p.path, m.topology(), 3));
          CHECK_NOTHROW(m.split_indices(p.path));
          CHECK(!emitted_before.contains(p.path));
          CHECK(p.reduced_cost == doctest::Approx(oracle::reduced_cost(m, ctx.duals(), p.path)));
          emitted_before.insert(p.path);
        }
      }
    }
  }

  TEST_CASE("reprioritizing clears the pool and floors leaf weights") {
    HeuristicParams hp;
    HeuristicState s(hp, 4, 1);
    s.pool.push_back({});
    const std::vector<double> best{3.0, -1.0, 0.0, 0.5};
    s.reprioritize(best);
    CHECK(s.pool.empty());
    CHECK(s.leaf_weights == std::vector<double>{3.0, 1e-3, 1e-3, 0.5});
  }
}
