#ifndef CGTREE_CART_HPP
#define CGTREE_CART_HPP

#include "cgtree/dataset.hpp"
#include "cgtree/tree.hpp"

#include <optional>
#include <span>
#include <vector>

namespace cgtree {

enum class Criterion { gini, entropy };
enum class ClassWeight { none, balanced };

const char* to_string(Criterion c);
const char* to_string(ClassWeight w);

/// Greedy CART settings. Unset fractions fall back to the usual library
/// defaults (a node needs 2 rows to split, a leaf needs 1 row).
struct CartParams {
  int max_depth = 2;
  Criterion criterion = Criterion::gini;
  std::optional<double> min_samples_split;  // fraction of the rows passed to build()
  std::optional<double> min_leaf_fraction;  // fraction of the rows passed to build()
  ClassWeight class_weight = ClassWeight::none;

  void validate() const;
};

struct CartNode {
  bool present = false;
  bool is_leaf = true;
  Split split;
  int majority = 0;  // weighted majority class
  std::vector<std::size_t> counts;
};

/// CART result in heap order over a depth-max_depth frame; nodes below a
/// leaf are absent.
struct CartTree {
  int max_depth = 1;
  std::vector<CartNode> nodes;

  /// Depth actually grown (0 for a single leaf).
  int grown_depth() const;
  NodeId route(std::span<const double> row) const;
  int predict(std::span<const double> row) const { return nodes[route(row)].majority; }
  double accuracy(const Dataset& d, std::span<const std::size_t> rows) const;
};

/// Resolved per-build constants: class weights and the row-count thresholds.
struct CartContext {
  std::vector<double> class_weights;
  std::size_t min_split_rows = 2;
  std::size_t min_leaf_rows = 1;
};

CartContext make_context(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params);

/// Impurity of weighted class counts (w_t * n_t). Throws on all-zero input.
double impurity(std::span<const double> weighted_counts, Criterion criterion);
double impurity(std::span<const std::size_t> counts, Criterion criterion, std::span<const double> weights);

/// Child-size-weighted impurity of a candidate split.
double split_score(std::span<const std::size_t> left, std::span<const std::size_t> right, Criterion criterion,
                   std::span<const double> weights);

struct ScoredSplit {
  Split split;
  double score;
};

/// Best split over all (feature, observed value) candidates for `rows`, or
/// none when the node is pure, too small, or no candidate satisfies the
/// leaf-size rule. Ties go to the lowest feature, then lowest threshold.
std::optional<ScoredSplit> best_split(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params,
                                      const CartContext& ctx);
std::optional<ScoredSplit> best_split(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params);

CartTree build_cart(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params);

struct CartGridCell {
  CartParams params;
  double cv_accuracy;
};

struct CartStarResult {
  CartParams params;
  CartTree tree;
  std::vector<CartGridCell> grid;  // every evaluated cell, in grid order
};

/// The 80-cell hyperparameter grid, in evaluation order.
std::vector<CartParams> cart_star_grid(int max_depth);

/// Exhaustive grid search scored by 10-fold cross-validated accuracy on
/// `rows` (contiguous folds in the given order); the winner is refit on all
/// rows. Ties keep the earliest cell.
CartStarResult tune_cart_star(const Dataset& d, std::span<const std::size_t> rows, int max_depth);

}  // namespace cgtree

#endif  // CGTREE_CART_HPP
