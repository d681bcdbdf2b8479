#include "cgtree/lp.hpp"
#include "cgtree/milp.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

using namespace cgtree;
using namespace cgtree::lp;

namespace {

double dot_rhs(const LinearProgram& p, const std::vector<double>& y) {
  double s = 0;
  for (int i = 0; i < p.n_rows(); ++i) s += p.rhs(i) * y[static_cast<std::size_t>(i)];
  return s;
}

void check_bounds(const LinearProgram& p, const std::vector<double>& x) {
  for (int j = 0; j < p.n_vars(); ++j) {
    CHECK(x[static_cast<std::size_t>(j)] >= p.lower(j) - 1e-9);
    CHECK(x[static_cast<std::size_t>(j)] <= p.upper(j) + 1e-9);
  }
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("box-bounded programs match vertex enumeration") {
    std::mt19937_64 rng(101);
    int optimal = 0, infeasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
      const auto p = oracle::random_box_lp(rng, trial % 4 != 0);
      const auto want = oracle::enumerate_vertices(p);
      const auto got = solve_lp(p);
      CAPTURE(trial);
      if (!want) {
        CHECK(got.status == LpStatus::infeasible);
        ++infeasible;
        continue;
      }
      REQUIRE(got.status == LpStatus::optimal);
      ++optimal;
      CHECK(std::abs(got.objective - want->objective) <= 1e-6);
      CHECK(p.primal_residual(got.x) <= 1e-6);
      check_bounds(p, got.x);
    }
    CHECK(optimal > 250);
    CHECK(infeasible > 20);
  }

  TEST_CASE("standard-form programs: optimum, strong duality and dual feasibility") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 300; ++trial) {
      const auto p = oracle::random_standard_lp(rng);
      const auto want = oracle::enumerate_vertices(p);
      REQUIRE(want);
      const auto got = solve_lp(p);
      CAPTURE(trial);
      REQUIRE(got.status == LpStatus::optimal);
      CHECK(std::abs(got.objective - want->objective) <= 1e-6);
      CHECK(std::abs(dot_rhs(p, got.duals) - got.objective) <= 1e-6);
      for (int j = 0; j < p.n_vars(); ++j) {
        double d = p.cost(j);
        for (const auto& e : p.column(j)) d -= got.duals[static_cast<std::size_t>(e.index)] * e.value;
        CHECK(d <= 1e-6);
        CHECK(std::abs(d * got.x[static_cast<std::size_t>(j)]) <= 1e-6);
      }
    }
  }

  TEST_CASE("warm starts after adding columns and tightening bounds") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 150; ++trial) {
      auto p = oracle::random_standard_lp(rng);
      auto first = solve_lp(p);
      REQUIRE(first.status == LpStatus::optimal);
      auto basis = first.basis;
      std::vector<Entry> col;
      for (int i = 0; i < p.n_rows(); ++i) col.push_back({i, static_cast<double>(trial % 3 + i % 2)});
      add_column(p, basis, 4.0, col);
      const auto warm = solve_lp(p, &basis);
      const auto want = oracle::enumerate_vertices(p);
      REQUIRE(want);
      REQUIRE(warm.status == LpStatus::optimal);
      CHECK(std::abs(warm.objective - want->objective) <= 1e-6);

      // cut the current optimum off through a bound, as branching does
      const int j = static_cast<int>(std::max_element(warm.x.begin(), warm.x.end()) - warm.x.begin());
      const double v = warm.x[static_cast<std::size_t>(j)];
      if (v < 0.5) continue;
      p.set_bounds(j, 0.0, std::floor(v - 0.25));
      const auto cut = solve_lp(p, &warm.basis);
      const auto want_cut = oracle::enumerate_vertices(p);
      if (!want_cut) {
        CHECK(cut.status == LpStatus::infeasible);
        continue;
      }
      REQUIRE(cut.status == LpStatus::optimal);
      CHECK(std::abs(cut.objective - want_cut->objective) <= 1e-6);
      check_bounds(p, cut.x);
    }
  }

  TEST_CASE("unbounded and empty programs") {
    LinearProgram p;
    const int r = p.add_row(0.0);
    const Entry a{r, 1.0}, b{r, -1.0};
    p.add_column(1.0, std::span(&a, 1));
    p.add_column(0.0, std::span(&b, 1));
    CHECK(solve_lp(p).status == LpStatus::unbounded);

    LinearProgram q;
    q.add_variable(2.0, 0.0, 3.0);
    q.add_variable(-1.0, 1.0, 5.0);
    const auto s = solve_lp(q);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(5.0));
  }

  TEST_CASE("inequality rows get slack columns") {
    LinearProgram p;
    const int x = p.add_variable(1.0);
    const int y = p.add_variable(1.0);
    const std::vector<Entry> row1{{x, 1.0}, {y, 2.0}}, row2{{x, 3.0}, {y, 1.0}};
    p.add_constraint(row1, Sense::le, 4.0);
    p.add_constraint(row2, Sense::le, 6.0);
    CHECK(p.n_vars() == 4);
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(2.8));  // x = 1.6, y = 1.2
    std::ostringstream os;
    write_lp_text(os, p);
    CHECK(os.str().find("Maximize") == 0);
  }

  TEST_CASE("heavily degenerate assignment polytope") {
    // n x n assignment: many optimal and degenerate vertices
    const int n = 6;
    LinearProgram p;
    for (int i = 0; i < 2 * n; ++i) p.add_row(1.0);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> c(0, 2);
    std::vector<std::vector<int>> w(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c(rng);
        const std::vector<Entry> col{{i, 1.0}, {n + j, 1.0}};
        p.add_column(w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], col);
      }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int best = 0;
    do {
      int s = 0;
      for (int i = 0; i < n; ++i) s += w[static_cast<std::size_t>(i)][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(best));
  }

  TEST_CASE("a spent time budget stops the solve") {
    std::mt19937_64 rng(4);
    const auto p = oracle::random_standard_lp(rng);
    LpOptions opt;
    opt.time_limit_seconds = 0.0;
    CHECK(solve_lp(p, nullptr, opt).status == LpStatus::time_limit);
    opt.max_iterations = 0;
    opt.time_limit_seconds = kInf;
    CHECK(solve_lp(p, nullptr, opt).status == LpStatus::iteration_limit);
  }
}

TEST_SUITE("milp") {
  TEST_CASE("branch and bound matches full enumeration") {
    std::mt19937_64 rng(404);
    int solved = 0;
    for (int trial = 0; trial < 150; ++trial) {
      auto p = oracle::random_box_lp(rng, true);
      std::vector<int> ints;
      for (int j = 0; j < p.n_vars(); ++j)
        if (j % 2 == 0 || trial % 5 == 0) {
          ints.push_back(j);
          p.set_bounds(j, 0.0, std::min(2.0, p.upper(j)));
        }
      const auto want = oracle::enumerate_integer(p, ints);
      MilpSpec spec;
      spec.program = p;
      spec.integer_vars = ints;
      const auto got = solve_milp(spec);
      CAPTURE(trial);
      if (!want) {
        CHECK(got.status == MilpStatus::infeasible);
        continue;
      }
      ++solved;
      REQUIRE(got.has_solution());
      CHECK(got.proven_optimal);
      CHECK(std::abs(got.objective - *want) <= 1e-6);
      for (int j : ints) CHECK(got.x[static_cast<std::size_t>(j)] == std::round(got.x[static_cast<std::size_t>(j)]));
      CHECK(p.primal_residual(got.x) <= 1e-6);
      CHECK(got.root_bound >= got.objective - 1e-6);
    }
    CHECK(solved > 50);
  }

  TEST_CASE("a known incumbent is kept when nothing beats it") {
    LinearProgram p;
    const int r = p.add_row(1.0);
    const Entry a{r, 1.0};
    p.add_column(1.0, std::span(&a, 1), 0.0, 1.0);
    p.add_column(1.0, std::span(&a, 1), 0.0, 1.0);
    MilpSpec spec;
    spec.program = p;
    spec.integer_vars = {0, 1};
    spec.incumbent = std::vector<double>{1.0, 0.0};
    const auto got = solve_milp(spec);
    CHECK(got.proven_optimal);
    CHECK(got.objective == 1.0);
  }
}
