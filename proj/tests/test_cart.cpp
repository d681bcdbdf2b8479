#include "cgtree/cart.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cgtree;

TEST_SUITE("cart") {
  TEST_CASE("impurity values") {
    const std::vector<double> even{5, 5}, pure{4, 0}, three{1, 1, 2};
    CHECK(impurity(even, Criterion::gini) == doctest::Approx(0.5));
    CHECK(impurity(even, Criterion::entropy) == doctest::Approx(1.0));
    CHECK(impurity(pure, Criterion::gini) == 0.0);
    CHECK(impurity(pure, Criterion::entropy) == 0.0);
    CHECK(impurity(three, Criterion::gini) == doctest::Approx(1.0 - (1.0 / 16 + 1.0 / 16 + 0.25)));
    const std::vector<double> zero{0, 0};
    CHECK_THROWS(impurity(zero, Criterion::gini));
  }

  TEST_CASE("best split matches an exhaustive Gini scan") {
    std::mt19937_64 rng(77);
    CartParams p;
    for (int trial = 0; trial < 200; ++trial) {
      const auto d = oracle::random_dataset(rng, 8 + static_cast<std::size_t>(trial % 30), 1 + trial % 4, 2 + trial % 3);
      const auto rows = oracle::all_rows(d);
      const auto got = best_split(d, rows, p);
      const auto want = oracle::gini_scan(d, rows);
      const auto counts = class_histogram(d);
      const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
      if (pure || !want) {
        CHECK(!got);
        continue;
      }
      REQUIRE(got);
      CHECK(got->score == doctest::Approx(want->score).epsilon(1e-12));
      std::vector<std::size_t> l, r;
      for (auto row : rows) (got->split.passes(d.row(row)) ? l : r).push_back(row);
      std::vector<std::size_t> lc(static_cast<std::size_t>(d.n_classes())), rc(lc.size());
      for (auto row : l) ++lc[static_cast<std::size_t>(d.target(row))];
      for (auto row : r) ++rc[static_cast<std::size_t>(d.target(row))];
      const std::vector<double> w(lc.size(), 1.0);
      CHECK(split_score(lc, rc, Criterion::gini, w) == doctest::Approx(want->score).epsilon(1e-12));
    }
  }

  TEST_CASE("separable data is fit exactly") {
    Matrix v(6, 1);
    v << 1, 2, 3, 4, 5, 6;
    const Dataset d(v, {0, 0, 0, 1, 1, 1}, 2);
    const auto rows = oracle::all_rows(d);
    CartParams p;
    p.max_depth = 2;
    const auto t = build_cart(d, rows, p);
    CHECK(t.accuracy(d, rows) == 1.0);
    CHECK(t.grown_depth() == 1);
    CHECK(t.nodes[0].split.threshold == 3.0);  // an observed value, not a midpoint
  }

  TEST_CASE("minimum leaf size is respected") {
    std::mt19937_64 rng(3);
    const auto d = oracle::random_dataset(rng, 60, 3, 3);
    const auto rows = oracle::all_rows(d);
    CartParams p;
    p.max_depth = 3;
    p.min_leaf_fraction = 0.2;
    const auto t = build_cart(d, rows, p);
    for (const auto& n : t.nodes) {
      if (!n.present) continue;
      std::size_t total = 0;
      for (auto c : n.counts) total += c;
      CHECK(total >= 12);
    }
  }

  TEST_CASE("balanced class weights change the majority") {
    Matrix v(5, 1);
    v << 0, 0, 0, 0, 0;
    const Dataset d(v, {0, 0, 0, 1, 1}, 2);
    const auto rows = oracle::all_rows(d);
    CartParams p;
    CHECK(build_cart(d, rows, p).nodes[0].majority == 0);
    p.class_weight = ClassWeight::balanced;
    const auto ctx = make_context(d, rows, p);
    CHECK(ctx.class_weights[1] > ctx.class_weights[0]);
  }

  TEST_CASE("CART* grid and tuning") {
    const auto grid = cart_star_grid(2);
    CHECK(grid.size() == 80);
    std::mt19937_64 rng(8);
    const auto d = oracle::random_dataset(rng, 60, 3, 2);
    const auto rows = oracle::all_rows(d);
    const auto r = tune_cart_star(d, rows, 2);
    CHECK(r.grid.size() == 80);
    double best = 0;
    for (const auto& c : r.grid) best = std::max(best, c.cv_accuracy);
    const auto first = std::find_if(r.grid.begin(), r.grid.end(), [&](const auto& c) { return c.cv_accuracy == best; });
    CHECK(first->params.criterion == r.params.criterion);
    CHECK(first->params.min_samples_split == r.params.min_samples_split);
    CHECK(first->params.min_leaf_fraction == r.params.min_leaf_fraction);
    CHECK(first->params.class_weight == r.params.class_weight);
  }
}
