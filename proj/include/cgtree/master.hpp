#ifndef CGTREE_MASTER_HPP
#define CGTREE_MASTER_HPP

#include "cgtree/dataset.hpp"
#include "cgtree/lp.hpp"
#include "cgtree/milp.hpp"
#include "cgtree/row_set.hpp"
#include "cgtree/sampling.hpp"
#include "cgtree/tree.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

namespace cgtree {

/// A decision path as a master column. The path itself is the identity key.
struct Column {
  DecisionPath path;
  std::size_t cp = 0;  // correct predictions at the leaf
  RowSet rows;         // rows reaching the leaf

  const DecisionPath& key() const { return path; }
};

/// Duals of the master LP, grouped by constraint family. gamma is indexed
/// [leaf position][level][index of the split in S_j].
struct DualValues {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::vector<std::vector<double>>> gamma;
};

struct Relaxation {
  double objective = 0.0;
  DualValues duals;
  std::vector<double> x;  // one value per column
  bool integral = false;
  std::size_t iterations = 0;
  bool warm_started = false;
};

struct IntegerSolution {
  DecisionTree tree;
  double objective = 0.0;
  double bound = 0.0;
  bool proven_optimal = false;
  std::size_t nodes = 0;
};

class MasterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a relaxation runs out of its time limit.
class MasterTimeout : public MasterError {
 public:
  using MasterError::MasterError;
};

/// Path-selection master problem over one training set. Variables are the
/// rho_(j,a) first, then one x per column in insertion order. Rows: one per
/// leaf, one per training row, then one per (leaf, level, split in S_j).
class MasterModel {
 public:
  MasterModel(const Dataset& train, RestrictedSplits splits, int depth);

  const Dataset& data() const { return *data_; }
  const Topology& topology() const { return topo_; }
  const RestrictedSplits& splits() const { return splits_; }
  std::size_t n_rows() const { return data_->n_rows(); }

  /// Rows satisfying split a of node j.
  const RowSet& mask(NodeId j, std::size_t a) const { return masks_[j][a]; }
  const RowSet& class_rows(int t) const { return class_rows_[static_cast<std::size_t>(t)]; }

  /// Split indices into S_j along the path, root first. Throws MasterError
  /// for a split outside its node's set.
  std::vector<std::size_t> split_indices(const DecisionPath& p) const;
  RowSet rows_of(NodeId leaf, std::span<const std::size_t> split_idx) const;
  Column make_column(const DecisionPath& p) const;

  /// Adds the columns not yet present. Returns how many were added.
  std::size_t add_columns(std::span<const DecisionPath> paths);
  bool contains(const DecisionPath& p) const { return keys_.contains(p); }

  std::size_t n_columns() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const lp::LinearProgram& program() const { return program_; }

  int leaf_row(std::size_t leaf_pos) const { return static_cast<int>(leaf_pos); }
  int data_row(std::size_t r) const { return static_cast<int>(topo_.n_leaves() + r); }
  int consistency_row(std::size_t leaf_pos, int level, std::size_t a) const;
  int rho_var(NodeId j, std::size_t a) const { return static_cast<int>(rho_offset_[j] + a); }
  int column_var(std::size_t c) const { return static_cast<int>(n_rho_ + c); }
  std::size_t n_consistency_rows() const;

  Relaxation solve_relaxation(const lp::LpOptions& opt = {});

  /// Full-length variable vector selecting the given columns, with rho set
  /// accordingly.
  std::vector<double> point_for(std::span<const std::size_t> selected) const;

  /// Indices of the columns matching the paths of `t`; throws MasterError
  /// when one is missing.
  std::vector<std::size_t> columns_of_tree(const DecisionTree& t) const;

  /// Tree formed by the columns with x > 0.5.
  DecisionTree tree_from_solution(std::span<const double> x) const;

  void write_lp(std::ostream& os) const { lp::write_lp_text(os, program_); }

 private:
  const Dataset* data_;
  Topology topo_;
  RestrictedSplits splits_;
  std::vector<std::vector<RowSet>> masks_;
  std::vector<RowSet> class_rows_;
  std::vector<std::size_t> rho_offset_;
  std::size_t n_rho_ = 0;
  // first consistency row of (leaf position, level)
  std::vector<std::vector<std::size_t>> cons_offset_;
  std::vector<Column> columns_;
  std::set<DecisionPath> keys_;
  lp::LinearProgram program_;
  lp::Basis basis_;
};

/// Master over `train` seeded with `warm_paths`, which must form a tree.
MasterModel build_master(const RestrictedSplits& restricted, std::span<const DecisionPath> warm_paths,
                         const Dataset& train, int depth);

struct IntegerOptions {
  double time_limit_seconds = lp::kInf;
  std::size_t node_limit = 1'000'000;
};

/// Branch-and-bound over the x variables of the current columns, starting
/// from `incumbent` (which must be made of columns of m).
IntegerSolution solve_integer(const MasterModel& m, const DecisionTree& incumbent, const IntegerOptions& opt = {});

}  // namespace cgtree

#endif  // CGTREE_MASTER_HPP
