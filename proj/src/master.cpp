#include "cgtree/master.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cgtree {

MasterModel::MasterModel(const Dataset& train, RestrictedSplits splits, int depth)
    : data_(&train), topo_(depth), splits_(std::move(splits)) {
  const auto n_int = topo_.n_internal();
  if (splits_.n_nodes() != n_int) throw MasterError("master: split sets do not match the topology");
  for (NodeId j = 0; j < n_int; ++j)
    if (splits_.at(j).empty()) throw MasterError("master: empty split set at node " + std::to_string(j));

  const auto n = train.n_rows();
  masks_.resize(n_int);
  for (NodeId j = 0; j < n_int; ++j)
    for (const auto& s : splits_.at(j)) masks_[j].push_back(split_mask(s, train));
  class_rows_.assign(static_cast<std::size_t>(train.n_classes()), RowSet(n));
  for (std::size_t r = 0; r < n; ++r) class_rows_[static_cast<std::size_t>(train.target(r))].set(r);

  for (std::size_t l = 0; l < topo_.n_leaves(); ++l) program_.add_row(1.0, "leaf_" + std::to_string(topo_.leaf(l)));
  for (std::size_t r = 0; r < n; ++r) program_.add_row(1.0, "row_" + std::to_string(r));
  cons_offset_.resize(topo_.n_leaves());
  for (std::size_t l = 0; l < topo_.n_leaves(); ++l) {
    const auto nodes = topo_.path_nodes(topo_.leaf(l));
    for (std::size_t h = 0; h < nodes.size(); ++h) {
      cons_offset_[l].push_back(static_cast<std::size_t>(program_.n_rows()));
      for (std::size_t a = 0; a < splits_.at(nodes[h]).size(); ++a)
        program_.add_row(0.0, "cons_" + std::to_string(topo_.leaf(l)) + "_" + std::to_string(nodes[h]) + "_" +
                                  std::to_string(a));
    }
  }

  rho_offset_.resize(n_int);
  for (NodeId j = 0; j < n_int; ++j) {
    rho_offset_[j] = n_rho_;
    const int level = Topology::level_of(j);
    const auto below = topo_.leaves_below(j);
    for (std::size_t a = 0; a < splits_.at(j).size(); ++a) {
      std::vector<lp::Entry> entries;
      for (auto leaf : below)
        entries.push_back({consistency_row(topo_.leaf_index(leaf), level, a), -1.0});
      program_.add_column(0.0, entries, 0.0, lp::kInf, "rho_" + std::to_string(j) + "_" + std::to_string(a));
      ++n_rho_;
    }
  }
}

int MasterModel::consistency_row(std::size_t leaf_pos, int level, std::size_t a) const {
  return static_cast<int>(cons_offset_[leaf_pos][static_cast<std::size_t>(level)] + a);
}

std::size_t MasterModel::n_consistency_rows() const {
  return static_cast<std::size_t>(program_.n_rows()) - topo_.n_leaves() - n_rows();
}

std::vector<std::size_t> MasterModel::split_indices(const DecisionPath& p) const {
  const auto nodes = topo_.path_nodes(p.leaf);
  std::vector<std::size_t> idx;
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    auto i = splits_.index_of(nodes[h], p.splits[h]);
    if (!i)
      throw MasterError("master: split " + to_string(p.splits[h]) + " is not in the set of node " +
                        std::to_string(nodes[h]));
    idx.push_back(*i);
  }
  return idx;
}

RowSet MasterModel::rows_of(NodeId leaf, std::span<const std::size_t> split_idx) const {
  const auto nodes = topo_.path_nodes(leaf);
  const auto left = topo_.goes_left(leaf);
  RowSet rows = RowSet::all(n_rows());
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    const auto& m = masks_[nodes[h]][split_idx[h]];
    if (left[h])
      rows &= m;
    else
      rows.subtract(m);
  }
  return rows;
}

Column MasterModel::make_column(const DecisionPath& p) const {
  validate_path(p, topo_, data_->n_classes());
  const auto idx = split_indices(p);
  Column c;
  c.path = p;
  c.rows = rows_of(p.leaf, idx);
  c.cp = intersection_count(c.rows, class_rows_[static_cast<std::size_t>(p.target)]);
  return c;
}

std::size_t MasterModel::add_columns(std::span<const DecisionPath> paths) {
  std::size_t added = 0;
  for (const auto& p : paths) {
    if (keys_.contains(p)) continue;
    auto c = make_column(p);
    const auto idx = split_indices(p);
    const auto l = topo_.leaf_index(p.leaf);
    std::vector<lp::Entry> entries;
    entries.push_back({leaf_row(l), 1.0});
    c.rows.for_each([&](std::size_t r) { entries.push_back({data_row(r), 1.0}); });
    for (std::size_t h = 0; h < idx.size(); ++h)
      entries.push_back({consistency_row(l, static_cast<int>(h), idx[h]), 1.0});
    if (basis_.empty())
      program_.add_column(static_cast<double>(c.cp), entries);
    else
      lp::add_column(program_, basis_, static_cast<double>(c.cp), entries);
    keys_.insert(p);
    columns_.push_back(std::move(c));
    ++added;
  }
  return added;
}

Relaxation MasterModel::solve_relaxation(const lp::LpOptions& opt) {
  auto sol = lp::solve_lp(program_, basis_.empty() ? nullptr : &basis_, opt);
  if (sol.status == lp::LpStatus::time_limit) throw MasterTimeout("master LP: time limit reached");
  if (sol.status != lp::LpStatus::optimal)
    throw MasterError(std::string("master LP not solved: ") + lp::to_string(sol.status));
  basis_ = sol.basis;

  Relaxation out;
  out.objective = sol.objective;
  out.iterations = sol.iterations;
  out.warm_started = sol.warm_started;
  const auto L = topo_.n_leaves();
  out.duals.alpha.assign(sol.duals.begin(), sol.duals.begin() + static_cast<std::ptrdiff_t>(L));
  out.duals.beta.assign(sol.duals.begin() + static_cast<std::ptrdiff_t>(L),
                        sol.duals.begin() + static_cast<std::ptrdiff_t>(L + n_rows()));
  out.duals.gamma.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    const auto nodes = topo_.path_nodes(topo_.leaf(l));
    out.duals.gamma[l].resize(nodes.size());
    for (std::size_t h = 0; h < nodes.size(); ++h)
      for (std::size_t a = 0; a < splits_.at(nodes[h]).size(); ++a)
        out.duals.gamma[l][h].push_back(sol.duals[static_cast<std::size_t>(consistency_row(l, static_cast<int>(h), a))]);
  }
  out.integral = true;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const double v = sol.x[static_cast<std::size_t>(column_var(c))];
    out.x.push_back(v);
    if (std::min(std::abs(v), std::abs(v - 1.0)) > 1e-6) out.integral = false;
  }
  return out;
}

std::vector<double> MasterModel::point_for(std::span<const std::size_t> selected) const {
  std::vector<double> x(static_cast<std::size_t>(program_.n_vars()), 0.0);
  for (auto c : selected) {
    x[static_cast<std::size_t>(column_var(c))] = 1.0;
    const auto& p = columns_[c].path;
    const auto nodes = topo_.path_nodes(p.leaf);
    const auto idx = split_indices(p);
    for (std::size_t h = 0; h < nodes.size(); ++h) x[static_cast<std::size_t>(rho_var(nodes[h], idx[h]))] = 1.0;
  }
  return x;
}

std::vector<std::size_t> MasterModel::columns_of_tree(const DecisionTree& t) const {
  std::vector<std::size_t> out;
  for (const auto& p : paths_of_tree(t)) {
    auto it = std::find_if(columns_.begin(), columns_.end(), [&](const Column& c) { return c.path == p; });
    if (it == columns_.end()) throw MasterError("master: tree path at leaf " + std::to_string(p.leaf) + " is not a column");
    out.push_back(static_cast<std::size_t>(it - columns_.begin()));
  }
  return out;
}

DecisionTree MasterModel::tree_from_solution(std::span<const double> x) const {
  std::vector<DecisionPath> chosen;
  for (std::size_t c = 0; c < columns_.size(); ++c)
    if (x[c] > 0.5) chosen.push_back(columns_[c].path);
  if (chosen.size() != topo_.n_leaves()) throw MasterError("master: solution does not select one path per leaf");
  return tree_from_paths(chosen);
}

MasterModel build_master(const RestrictedSplits& restricted, std::span<const DecisionPath> warm_paths,
                         const Dataset& train, int depth) {
  // rejects disagreeing or incomplete warm starts before anything is solved
  const auto tree = tree_from_paths(warm_paths);
  if (tree.depth != depth) throw MasterError("master: warm start has the wrong depth");
  MasterModel m(train, restricted, depth);
  m.add_columns(warm_paths);
  return m;
}

IntegerSolution solve_integer(const MasterModel& m, const DecisionTree& incumbent, const IntegerOptions& opt) {
  lp::MilpSpec spec;
  spec.program = m.program();
  for (std::size_t c = 0; c < m.n_columns(); ++c) spec.integer_vars.push_back(m.column_var(c));
  spec.incumbent = m.point_for(m.columns_of_tree(incumbent));
  spec.time_limit_seconds = opt.time_limit_seconds;
  spec.node_limit = opt.node_limit;
  const auto res = lp::solve_milp(spec);
  if (!res.has_solution()) throw MasterError(std::string("master ILP: no solution (") + lp::to_string(res.status) + ")");

  std::vector<double> x;
  for (std::size_t c = 0; c < m.n_columns(); ++c) x.push_back(res.x[static_cast<std::size_t>(m.column_var(c))]);
  IntegerSolution out;
  out.tree = m.tree_from_solution(x);
  out.objective = res.objective;
  out.bound = res.bound;
  out.proven_optimal = res.proven_optimal;
  out.nodes = res.nodes;
  return out;
}

}  // namespace cgtree
