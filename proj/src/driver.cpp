#include "cgtree/driver.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace cgtree {

const char* to_string(ExactPricing e) { return e == ExactPricing::enumeration ? "enumeration" : "milp"; }

const char* to_string(Termination t) {
  switch (t) {
    case Termination::lp_optimal: return "lp_optimal";
    case Termination::time_limit: return "time_limit";
    case Termination::heuristic_exhausted: return "heuristic_exhausted";
  }
  return "?";
}

void CghConfig::validate() const {
  if (depth < 1 || depth > 20) throw std::invalid_argument("cgh: depth must be in 1..20");
  if (!(time_limit_seconds > 0)) throw std::invalid_argument("cgh: time limit must be positive");
  if (!(reduced_cost_tol >= 0)) throw std::invalid_argument("cgh: reduced cost tolerance must be nonnegative");
  sampling.validate(depth);
}

CghResult run_cgh(const Dataset& d, std::span<const std::size_t> train_rows, const CghConfig& cfg) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(cfg.time_limit_seconds));
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };
  const Topology topo(cfg.depth);
  if (train_rows.size() < topo.n_leaves())
    throw std::invalid_argument("cgh: need at least 2^depth training rows");

  CghResult out;
  out.big_data = cfg.big_data.value_or(train_rows.size() > cfg.big_data_rows);

  auto sp = cfg.sampling;
  sp.seed = cfg.seed;
  auto sampled = run_threshold_sampling(d, train_rows, cfg.depth, sp);
  out.splits = sampled.splits;
  out.sampling_iterations = sampled.iterations;

  const Dataset train = d.subset(train_rows);
  const auto n = static_cast<double>(train.n_rows());
  out.cart_train_accuracy = static_cast<double>(tree_correct_count(sampled.warm_tree, train)) / n;

  auto master = build_master(sampled.splits, sampled.warm_paths, train, cfg.depth);
  HeuristicState state(cfg.heuristic, topo.n_leaves(), cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  auto known = [&](const DecisionPath& p) { return master.contains(p); };

  auto remaining = [&] {
    lp::LpOptions o;
    o.time_limit_seconds = std::max(0.0, std::chrono::duration<double>(deadline - clock::now()).count());
    return o;
  };
  Relaxation rel = master.solve_relaxation();
  // false once a relaxation was cut short; rel then belongs to fewer columns
  bool rel_current = true;
  auto resolve = [&] {
    try {
      rel = master.solve_relaxation(remaining());
      out.objective_history.push_back(rel.objective);
    } catch (const MasterTimeout&) {
      rel_current = false;
    }
  };

  auto log = [&](const char* mode, std::size_t added) {
    if (!cfg.log) return;
    *cfg.log << "iter=" << out.iterations << " lp=" << std::setprecision(17) << out.objective_history.back()
             << " mode=" << mode << " added=" << added << " columns=" << master.n_columns() << " simplex=" << rel.iterations
             << (rel.warm_started ? " warm" : " cold")
             << " elapsed=" << std::setprecision(6) << elapsed() << '\n';
  };

  out.objective_history.push_back(rel.objective);
  bool stale = false;  // columns added since the last solve
  out.termination = Termination::time_limit;
  while (out.iterations < cfg.max_iterations) {
    if (clock::now() >= deadline) {
      out.termination = Termination::time_limit;
      break;
    }
    if (stale) {
      resolve();
      stale = false;
      if (!rel_current) {
        out.termination = Termination::time_limit;
        break;
      }
    }
    ++out.iterations;
    if (rel.objective >= n - 1e-9) {
      // every row is already classified correctly
      out.termination = Termination::lp_optimal;
      log("bound", 0);
      break;
    }
    const PricingContext ctx(master, rel.duals);

    auto generated = heuristic_generate(ctx, state, known);
    if (!generated.empty()) {
      std::vector<DecisionPath> paths;
      for (auto& g : generated) paths.push_back(std::move(g.path));
      const auto added = master.add_columns(paths);
      state.failures = 0;
      stale = added > 0;
      log("heuristic", added);
      continue;
    }
    log("heuristic", 0);
    if (state.failures < cfg.heuristic.failure_threshold) continue;
    if (out.big_data) {
      out.termination = Termination::heuristic_exhausted;
      break;
    }

    const auto mode = cfg.exact == ExactPricing::milp ? PricingMode::milp : PricingMode::exact_enum;
    const auto round = price_all(ctx, mode, deadline, cfg.trace, out.iterations);
    ++out.exact_rounds;
    std::vector<DecisionPath> positive;
    for (const auto& p : round.best)
      if (p.reduced_cost > cfg.reduced_cost_tol && !master.contains(p.path)) positive.push_back(p.path);
    if (positive.empty()) {
      if (!round.complete) {
        out.termination = Termination::time_limit;
        break;
      }
      out.termination = Termination::lp_optimal;
      log(to_string(mode), 0);
      break;
    }
    const auto added = master.add_columns(positive);
    state.reprioritize(round.best_per_leaf);
    state.failures = 0;
    stale = added > 0;
    log(to_string(mode), added);
  }

  if (stale) resolve();
  out.lp_bound = rel.objective;
  out.lp_was_integral = rel_current && rel.integral;
  if (out.lp_was_integral) {
    out.tree = master.tree_from_solution(rel.x);
  } else {
    IntegerOptions io;
    io.time_limit_seconds = std::max(0.0, std::chrono::duration<double>(deadline - clock::now()).count());
    auto sol = solve_integer(master, sampled.warm_tree, io);
    out.tree = sol.tree;
    out.ilp_proven_optimal = sol.proven_optimal;
  }
  out.ilp_objective = static_cast<double>(tree_correct_count(out.tree, train));
  out.train_accuracy = out.ilp_objective / n;
  out.columns_generated = master.n_columns() - sampled.warm_paths.size();
  for (const auto& c : master.columns()) out.columns.push_back(c.path);
  out.wall_seconds = elapsed();
  if (cfg.log)
    *cfg.log << "done termination=" << to_string(out.termination) << " lp_bound=" << std::setprecision(17)
             << out.lp_bound << " ilp=" << out.ilp_objective << " integral=" << out.lp_was_integral << '\n';
  return out;
}

double evaluate(const CghResult& result, const Dataset& d, std::span<const std::size_t> test_rows) {
  if (test_rows.empty()) throw std::invalid_argument("evaluate: no test rows");
  std::size_t correct = 0;
  for (auto r : test_rows) correct += result.tree.target_of_leaf(route_row(result.tree, d.row(r))) == d.target(r);
  return static_cast<double>(correct) / static_cast<double>(test_rows.size());
}

}  // namespace cgtree
