#ifndef CGTREE_DRIVER_HPP
#define CGTREE_DRIVER_HPP

#include "cgtree/master.hpp"
#include "cgtree/pricing.hpp"
#include "cgtree/sampling.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace cgtree {

enum class ExactPricing { enumeration, milp };
enum class Termination { lp_optimal, time_limit, heuristic_exhausted };
const char* to_string(ExactPricing e);
const char* to_string(Termination t);

struct CghConfig {
  int depth = 2;
  SamplingParams sampling;
  HeuristicParams heuristic;
  double time_limit_seconds = 600.0;
  /// Unset: on when the training set has more than big_data_rows rows.
  std::optional<bool> big_data;
  std::size_t big_data_rows = 10000;
  std::uint64_t seed = 1;
  ExactPricing exact = ExactPricing::enumeration;
  double reduced_cost_tol = 1e-6;
  std::size_t max_iterations = 1'000'000;
  std::ostream* log = nullptr;    // one line per iteration
  std::ostream* trace = nullptr;  // per (iteration, leaf, target) exact pricing values

  void validate() const;
};

struct CghResult {
  DecisionTree tree;
  double train_accuracy = 0.0;
  double cart_train_accuracy = 0.0;
  double lp_bound = 0.0;  // last completed relaxation
  double ilp_objective = 0.0;
  bool lp_was_integral = false;
  bool ilp_proven_optimal = true;
  std::size_t iterations = 0;
  std::size_t columns_generated = 0;
  std::size_t exact_rounds = 0;
  double wall_seconds = 0.0;
  Termination termination = Termination::lp_optimal;
  bool big_data = false;
  RestrictedSplits splits;
  std::size_t sampling_iterations = 0;
  std::vector<double> objective_history;  // LP objective per master solve
  std::vector<DecisionPath> columns;       // every column of the final master
};

/// Full pipeline on the given training rows: threshold sampling, CART warm
/// start, column generation with heuristic then exact pricing, and integer
/// recovery when the final LP is fractional.
CghResult run_cgh(const Dataset& d, std::span<const std::size_t> train_rows, const CghConfig& cfg);

/// Accuracy of the result's tree on held-out rows.
double evaluate(const CghResult& result, const Dataset& d, std::span<const std::size_t> test_rows);

}  // namespace cgtree

#endif  // CGTREE_DRIVER_HPP
