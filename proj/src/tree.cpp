#include "cgtree/tree.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cgtree {

Topology::Topology(int depth) : depth_(depth) {
  if (depth < 1 || depth > 20) throw std::invalid_argument("topology: depth must be in 1..20");
}

int Topology::level_of(NodeId n) {
  int level = 0;
  while (n > 0) {
    n = (n - 1) / 2;
    ++level;
  }
  return level;
}

std::vector<NodeId> Topology::path_nodes(NodeId leaf) const {
  if (!is_leaf(leaf) || leaf >= first_leaf() + n_leaves()) throw std::out_of_range("topology: not a leaf");
  std::vector<NodeId> nodes(static_cast<std::size_t>(depth_));
  NodeId n = leaf;
  for (int h = depth_ - 1; h >= 0; --h) {
    n = (n - 1) / 2;
    nodes[static_cast<std::size_t>(h)] = n;
  }
  return nodes;
}

std::vector<bool> Topology::goes_left(NodeId leaf) const {
  std::vector<bool> left(static_cast<std::size_t>(depth_));
  NodeId n = leaf;
  for (int h = depth_ - 1; h >= 0; --h) {
    left[static_cast<std::size_t>(h)] = (n % 2 == 1);  // left children have odd ids
    n = (n - 1) / 2;
  }
  return left;
}

std::vector<NodeId> Topology::leaves_below(NodeId j) const {
  NodeId lo = j, hi = j;
  while (!is_leaf(lo)) {
    lo = 2 * lo + 1;
    hi = 2 * hi + 2;
  }
  std::vector<NodeId> out;
  for (NodeId l = lo; l <= hi; ++l) out.push_back(l);
  return out;
}

std::string to_string(const Split& s) {
  std::ostringstream os;
  os << std::setprecision(17) << "(f" << s.feature << " <= " << s.threshold << ")";
  return os.str();
}

PathDisagreement::PathDisagreement(NodeId n, Split a, Split b)
    : std::runtime_error("paths disagree at node " + std::to_string(n) + ": " + to_string(a) + " vs " +
                         to_string(b)),
      node(n),
      first(a),
      second(b) {}

bool splits_distinct(std::span<const Split> splits) {
  for (std::size_t i = 0; i < splits.size(); ++i)
    for (std::size_t j = i + 1; j < splits.size(); ++j)
      if (splits[i] == splits[j]) return false;
  return true;
}

void validate_path(const DecisionPath& p, const Topology& topo, int n_classes) {
  if (!topo.is_leaf(p.leaf) || p.leaf >= topo.first_leaf() + topo.n_leaves())
    throw InvalidPath("path: leaf id " + std::to_string(p.leaf) + " is not a leaf");
  if (p.splits.size() != static_cast<std::size_t>(topo.depth()))
    throw InvalidPath("path: expected one split per level");
  if (!splits_distinct(p.splits)) throw InvalidPath("path: splits along the path are not distinct");
  if (p.target < 0 || p.target >= n_classes) throw InvalidPath("path: target out of range");
}

NodeId route_row(const DecisionTree& t, std::span<const double> row) {
  const NodeId n_int = t.splits.size();
  NodeId n = 0;
  while (n < n_int) n = t.splits[n].passes(row) ? 2 * n + 1 : 2 * n + 2;
  return n;
}

RowSet split_mask(const Split& s, const Dataset& d) {
  RowSet m(d.n_rows());
  for (std::size_t r = 0; r < d.n_rows(); ++r)
    if (d.value(r, s.feature) <= s.threshold) m.set(r);
  return m;
}

RowSet rows_reaching_leaf(const DecisionPath& p, const Dataset& d, const RowSet& rows) {
  const Topology topo(static_cast<int>(p.splits.size()));
  const auto left = topo.goes_left(p.leaf);
  RowSet out = rows;
  for (std::size_t h = 0; h < p.splits.size(); ++h) {
    auto mask = split_mask(p.splits[h], d);
    if (left[h])
      out &= mask;
    else
      out.subtract(mask);
  }
  return out;
}

std::size_t correct_predictions(const DecisionPath& p, const Dataset& d, const RowSet& rows) {
  std::size_t n = 0;
  rows_reaching_leaf(p, d, rows).for_each([&](std::size_t r) { n += d.target(r) == p.target; });
  return n;
}

double tree_accuracy(const DecisionTree& t, const Dataset& d, const RowSet& rows) {
  const std::size_t total = rows.count();
  if (total == 0) throw std::invalid_argument("tree_accuracy: empty row set");
  std::size_t correct = 0;
  rows.for_each([&](std::size_t r) { correct += t.target_of_leaf(route_row(t, d.row(r))) == d.target(r); });
  return static_cast<double>(correct) / static_cast<double>(total);
}

double tree_accuracy(const DecisionTree& t, const Dataset& d) { return tree_accuracy(t, d, RowSet::all(d.n_rows())); }

std::size_t tree_correct_count(const DecisionTree& t, const Dataset& d) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < d.n_rows(); ++r) correct += t.target_of_leaf(route_row(t, d.row(r))) == d.target(r);
  return correct;
}

std::vector<DecisionPath> paths_of_tree(const DecisionTree& t) {
  const Topology topo(t.depth);
  std::vector<DecisionPath> out;
  for (std::size_t i = 0; i < topo.n_leaves(); ++i) {
    DecisionPath p;
    p.leaf = topo.leaf(i);
    for (auto n : topo.path_nodes(p.leaf)) p.splits.push_back(t.splits[n]);
    p.target = t.targets[i];
    out.push_back(std::move(p));
  }
  return out;
}

DecisionTree tree_from_paths(std::span<const DecisionPath> paths) {
  if (paths.empty()) throw std::invalid_argument("tree_from_paths: no paths");
  const int depth = static_cast<int>(paths.front().splits.size());
  const Topology topo(depth);
  if (paths.size() != topo.n_leaves()) throw std::invalid_argument("tree_from_paths: need exactly one path per leaf");
  DecisionTree t;
  t.depth = depth;
  t.splits.resize(topo.n_internal());
  t.targets.assign(topo.n_leaves(), -1);
  std::vector<bool> assigned(topo.n_internal(), false);
  for (const auto& p : paths) {
    if (p.splits.size() != static_cast<std::size_t>(depth))
      throw std::invalid_argument("tree_from_paths: paths of different depth");
    if (!splits_distinct(p.splits)) throw InvalidPath("tree_from_paths: repeated split along a path");
    const auto idx = topo.leaf_index(p.leaf);
    if (idx >= topo.n_leaves() || t.targets[idx] != -1)
      throw std::invalid_argument("tree_from_paths: duplicate or invalid leaf " + std::to_string(p.leaf));
    t.targets[idx] = p.target;
    const auto nodes = topo.path_nodes(p.leaf);
    for (std::size_t h = 0; h < nodes.size(); ++h) {
      const auto n = nodes[h];
      if (assigned[n] && t.splits[n] != p.splits[h]) throw PathDisagreement(n, t.splits[n], p.splits[h]);
      t.splits[n] = p.splits[h];
      assigned[n] = true;
    }
  }
  return t;
}

namespace {
std::string real17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
}  // namespace

void write_model(std::ostream& os, const DecisionTree& t) {
  const Topology topo(t.depth);
  os << "{\n  \"depth\": " << t.depth << ",\n  \"nodes\": [";
  for (std::size_t n = 0; n < t.splits.size(); ++n) {
    os << (n ? ",\n" : "\n") << "    {\"id\": " << n << ", \"feature\": " << t.splits[n].feature
       << ", \"threshold\": " << real17(t.splits[n].threshold) << "}";
  }
  os << "\n  ],\n  \"leaves\": [";
  for (std::size_t i = 0; i < t.targets.size(); ++i) {
    os << (i ? ",\n" : "\n") << "    {\"id\": " << topo.leaf(i) << ", \"target\": " << t.targets[i] << "}";
  }
  os << "\n  ]\n}\n";
}

std::string model_to_string(const DecisionTree& t) {
  std::ostringstream os;
  write_model(os, t);
  return os.str();
}

DecisionTree read_model(std::istream& is) {
  const auto j = nlohmann::json::parse(is);
  DecisionTree t;
  t.depth = j.at("depth").get<int>();
  const Topology topo(t.depth);
  const auto& nodes = j.at("nodes");
  const auto& leaves = j.at("leaves");
  if (nodes.size() != topo.n_internal() || leaves.size() != topo.n_leaves())
    throw std::invalid_argument("model: node/leaf count does not match depth");
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (nodes[n].at("id").get<std::size_t>() != n) throw std::invalid_argument("model: nodes out of order");
    t.splits.push_back({nodes[n].at("feature").get<std::size_t>(), nodes[n].at("threshold").get<double>()});
  }
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i].at("id").get<std::size_t>() != topo.leaf(i)) throw std::invalid_argument("model: leaves out of order");
    t.targets.push_back(leaves[i].at("target").get<int>());
  }
  return t;
}

void save_model(const std::filesystem::path& path, const DecisionTree& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_model(os, t);
}

DecisionTree load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_model(is);
}

}  // namespace cgtree
