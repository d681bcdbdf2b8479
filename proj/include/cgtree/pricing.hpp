#ifndef CGTREE_PRICING_HPP
#define CGTREE_PRICING_HPP

#include "cgtree/master.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace cgtree {

struct PricedPath {
  DecisionPath path;
  double reduced_cost = 0.0;
};

/// Read-only view used by all pricing routes: the master's split masks and
/// class row sets plus a frozen copy of the duals.
class PricingContext {
 public:
  PricingContext(const MasterModel& m, DualValues duals);

  const MasterModel& master() const { return *m_; }
  const DualValues& duals() const { return duals_; }
  const Topology& topology() const { return m_->topology(); }

  /// CP(p) - alpha_l - sum gamma_(l,j,s(j)) - sum_(r reaching l) beta_r.
  double reduced_cost(const DecisionPath& p) const;

  /// Reduced cost for every target given the path's rows; used to choose
  /// the best target for a fixed split tuple.
  std::vector<double> reduced_costs_by_target(std::size_t leaf_pos, std::span<const std::size_t> split_idx,
                                              const RowSet& rows) const;
  double beta_sum(const RowSet& rows) const;

 private:
  const MasterModel* m_;
  DualValues duals_;
};

double reduced_cost_of(const PricingContext& ctx, const DecisionPath& p);

struct HeuristicParams {
  std::size_t pool_capacity = 500;
  std::size_t leaves_per_round = 200;
  std::size_t columns_per_round = 100;
  int failure_threshold = 3;
  double min_leaf_weight = 1e-3;
};

struct HeuristicState {
  HeuristicState(const HeuristicParams& params, std::size_t n_leaves, std::uint64_t seed);

  HeuristicParams params;
  std::vector<PricedPath> pool;
  std::vector<double> leaf_weights;
  int failures = 0;
  std::mt19937_64 rng;

  /// Empties the pool and favors leaves by their best exact reduced cost.
  void reprioritize(std::span<const double> best_per_leaf);
};

/// One randomized round: draws leaves by weight, builds one random distinct
/// path per draw with its best target, merges into the pool and returns up
/// to n_c of the highest positive reduced cost paths not already known.
std::vector<PricedPath> heuristic_generate(const PricingContext& ctx, HeuristicState& state,
                                           const std::function<bool(const DecisionPath&)>& known = {});

/// Best path for (leaf, target) by enumerating every distinct split tuple.
PricedPath exact_enumerate(const PricingContext& ctx, NodeId leaf, int target);
/// Same enumeration, best path for every target of the leaf at once.
std::vector<PricedPath> exact_enumerate_leaf(const PricingContext& ctx, NodeId leaf);

struct MilpPriced {
  PricedPath best;
  bool proven_optimal = false;
  std::size_t nodes = 0;
};

/// Best path for (leaf, target) from the pricing integer program.
MilpPriced milp_price(const PricingContext& ctx, NodeId leaf, int target, double time_limit_seconds = lp::kInf);

/// Builds the pricing integer program for (leaf, target). Variables: u per
/// (level, split) first, then y per row. The objective omits -alpha_l.
lp::MilpSpec pricing_program(const PricingContext& ctx, NodeId leaf, int target);

enum class PricingMode { heuristic, exact_enum, milp };
const char* to_string(PricingMode m);

struct PricingRound {
  std::vector<PricedPath> best;  // one per (leaf, target) solved
  bool complete = true;          // false when the deadline cut the round short
  double max_reduced_cost = -lp::kInf;
  std::vector<double> best_per_leaf;
};

/// Solves every (leaf, target) subproblem with the exact route of `mode`.
/// The deadline is checked every 10 subproblems.
PricingRound price_all(const PricingContext& ctx, PricingMode mode,
                       std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt,
                       std::ostream* trace = nullptr, std::size_t round = 0);

}  // namespace cgtree

#endif  // CGTREE_PRICING_HPP
