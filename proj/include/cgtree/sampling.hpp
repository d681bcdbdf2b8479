#ifndef CGTREE_SAMPLING_HPP
#define CGTREE_SAMPLING_HPP

#include "cgtree/cart.hpp"
#include "cgtree/dataset.hpp"
#include "cgtree/tree.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cgtree {

struct SamplingParams {
  double alpha = 0.9;
  int tau = 300;
  std::vector<std::size_t> q;  // per internal node; empty -> default_q(k)
  std::uint64_t seed = 1;
  /// Hard cap on CART repetitions; 0 means 50 * tau.
  std::size_t max_iterations = 0;

  void validate(int depth) const;
};

/// w_(j,a): how often split a appeared at node j over the sampled trees.
using SplitFrequencies = std::map<std::pair<NodeId, Split>, std::size_t>;

/// Restricted split set S_j per internal node, each sorted by
/// (feature, threshold).
class RestrictedSplits {
 public:
  RestrictedSplits() = default;
  explicit RestrictedSplits(std::vector<std::vector<Split>> per_node);

  std::size_t n_nodes() const { return per_node_.size(); }
  const std::vector<Split>& at(NodeId j) const { return per_node_.at(j); }
  std::optional<std::size_t> index_of(NodeId j, const Split& s) const;
  bool contains(NodeId j, const Split& s) const { return index_of(j, s).has_value(); }
  std::size_t total() const;
  const std::vector<std::vector<Split>>& per_node() const { return per_node_; }

 private:
  std::vector<std::vector<Split>> per_node_;
};

/// q_root = floor(150 / |N_int|), q_j = floor(100 / |N_int|) elsewhere
/// (each at least 1).
std::vector<std::size_t> default_q(int depth);

struct SamplingResult {
  RestrictedSplits splits;
  SplitFrequencies frequencies;
  CartTree full_cart;  // CART on 100% of the training rows
  DecisionTree warm_tree;
  std::vector<DecisionPath> warm_paths;
  std::size_t iterations = 0;
};

/// Repeated CART on alpha-subsamples until tau consecutive trees bring no
/// new root split; keeps the q_j most frequent splits per node plus the
/// full-data CART split, and returns the full-data CART as 2^k warm-start
/// paths.
SamplingResult run_threshold_sampling(const Dataset& d, std::span<const std::size_t> train_rows, int depth,
                                      const SamplingParams& params);

/// Embeds a (possibly shallower) CART tree into the full depth-k frame.
/// Absent internal nodes take the first split of S_j not already used on
/// their root path; leaves below a CART leaf inherit its majority class, so
/// accuracy is unchanged.
DecisionTree align_cart_to_topology(const CartTree& c, int depth, const RestrictedSplits& restricted);

/// Splits over observed values used when sampling cannot supply enough
/// distinct splits: per feature its largest value, then the next largest,
/// and so on, interleaved across features.
std::vector<Split> fallback_splits(const Dataset& d, std::span<const std::size_t> rows, std::size_t count);

/// One line per (node, feature, threshold, frequency).
void write_splits(std::ostream& os, const RestrictedSplits& s, const SplitFrequencies& w);

}  // namespace cgtree

#endif  // CGTREE_SAMPLING_HPP
