#ifndef CGTREE_TREE_HPP
#define CGTREE_TREE_HPP

#include "cgtree/dataset.hpp"
#include "cgtree/row_set.hpp"

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgtree {

using NodeId = std::size_t;

/// Full binary tree of depth k in heap order: root 0, children of j are
/// 2j+1 and 2j+2. Internal nodes 0..2^k-2, leaves 2^k-1..2^{k+1}-2.
class Topology {
 public:
  explicit Topology(int depth);

  int depth() const { return depth_; }
  std::size_t n_internal() const { return (std::size_t{1} << depth_) - 1; }
  std::size_t n_leaves() const { return std::size_t{1} << depth_; }
  NodeId first_leaf() const { return n_internal(); }
  bool is_leaf(NodeId n) const { return n >= n_internal(); }
  static int level_of(NodeId n);

  /// Leaf id for leaf position 0..2^k-1 (left to right).
  NodeId leaf(std::size_t index) const { return first_leaf() + index; }
  std::size_t leaf_index(NodeId leaf) const { return leaf - first_leaf(); }

  /// Internal nodes of p_BT(leaf), root first (exactly k entries).
  std::vector<NodeId> path_nodes(NodeId leaf) const;
  /// goes_left(leaf)[h] is true iff the path descends to the left child of
  /// the level-h node, i.e. that node is in LC(leaf).
  std::vector<bool> goes_left(NodeId leaf) const;

  /// Leaves in the subtree rooted at internal node j.
  std::vector<NodeId> leaves_below(NodeId j) const;

 private:
  int depth_;
};

/// Univariate split: rows with v_f <= threshold go left.
struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;

  bool passes(std::span<const double> row) const { return row[feature] <= threshold; }
  auto operator<=>(const Split&) const = default;
};

std::string to_string(const Split& s);

/// Root-to-leaf decision path: one split per level (root first) plus the
/// predicted class at the leaf.
struct DecisionPath {
  NodeId leaf = 0;
  std::vector<Split> splits;
  int target = 0;

  auto operator<=>(const DecisionPath&) const = default;
};

struct DecisionTree {
  int depth = 1;
  std::vector<Split> splits;  // per internal node, heap order
  std::vector<int> targets;   // per leaf, left to right

  Topology topology() const { return Topology(depth); }
  int target_of_leaf(NodeId leaf) const { return targets[leaf - splits.size()]; }

  bool operator==(const DecisionTree&) const = default;
};

class PathDisagreement : public std::runtime_error {
 public:
  PathDisagreement(NodeId node, Split a, Split b);
  NodeId node;
  Split first;
  Split second;
};

class InvalidPath : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks the path conditions that do not depend on the restricted split sets:
/// correct length, pairwise distinct splits, target in range. Throws
/// InvalidPath on failure.
void validate_path(const DecisionPath& p, const Topology& topo, int n_classes);
bool splits_distinct(std::span<const Split> splits);

NodeId route_row(const DecisionTree& t, std::span<const double> row);

/// Rows of `d` satisfying v <= threshold.
RowSet split_mask(const Split& s, const Dataset& d);

/// R^l(p) within `rows`.
RowSet rows_reaching_leaf(const DecisionPath& p, const Dataset& d, const RowSet& rows);
std::size_t correct_predictions(const DecisionPath& p, const Dataset& d, const RowSet& rows);
double tree_accuracy(const DecisionTree& t, const Dataset& d, const RowSet& rows);
double tree_accuracy(const DecisionTree& t, const Dataset& d);
std::size_t tree_correct_count(const DecisionTree& t, const Dataset& d);

std::vector<DecisionPath> paths_of_tree(const DecisionTree& t);
/// Rebuilds the tree from exactly one path per leaf; throws PathDisagreement
/// when two paths assign different splits to a shared node.
DecisionTree tree_from_paths(std::span<const DecisionPath> paths);

/// Model file: {"depth":k,"nodes":[{"id","feature","threshold"}...],
/// "leaves":[{"id","target"}...]} with reals printed to 17 significant digits.
void write_model(std::ostream& os, const DecisionTree& t);
std::string model_to_string(const DecisionTree& t);
DecisionTree read_model(std::istream& is);
void save_model(const std::filesystem::path& path, const DecisionTree& t);
DecisionTree load_model(const std::filesystem::path& path);

}  // namespace cgtree

#endif  // CGTREE_TREE_HPP
