#include "cgtree/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

namespace cgtree {

void SamplingParams::validate(int depth) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("sampling: alpha must be in (0,1]");
  if (tau < 1) throw std::invalid_argument("sampling: tau must be >= 1");
  if (!q.empty()) {
    if (q.size() != Topology(depth).n_internal()) throw std::invalid_argument("sampling: q needs one entry per internal node");
    for (auto v : q)
      if (v < 1) throw std::invalid_argument("sampling: q_j must be >= 1");
  }
}

RestrictedSplits::RestrictedSplits(std::vector<std::vector<Split>> per_node) : per_node_(std::move(per_node)) {
  for (auto& s : per_node_) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

std::optional<std::size_t> RestrictedSplits::index_of(NodeId j, const Split& s) const {
  if (j >= per_node_.size()) return std::nullopt;
  const auto& v = per_node_[j];
  auto it = std::lower_bound(v.begin(), v.end(), s);
  if (it == v.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

std::size_t RestrictedSplits::total() const {
  std::size_t n = 0;
  for (const auto& s : per_node_) n += s.size();
  return n;
}

std::vector<std::size_t> default_q(int depth) {
  const Topology topo(depth);
  const auto n_int = topo.n_internal();
  std::vector<std::size_t> q(n_int, std::max<std::size_t>(1, 100 / n_int));
  q[0] = std::max<std::size_t>(1, 150 / n_int);
  return q;
}

std::vector<Split> fallback_splits(const Dataset& d, std::span<const std::size_t> rows, std::size_t count) {
  std::vector<std::vector<double>> values(d.n_features());
  for (std::size_t f = 0; f < d.n_features(); ++f) {
    for (auto r : rows) values[f].push_back(d.value(r, f));
    std::sort(values[f].begin(), values[f].end(), std::greater<>());
    values[f].erase(std::unique(values[f].begin(), values[f].end()), values[f].end());
  }
  std::vector<Split> out;
  for (std::size_t rank = 0; out.size() < count; ++rank) {
    bool any = false;
    for (std::size_t f = 0; f < d.n_features() && out.size() < count; ++f) {
      if (rank >= values[f].size()) continue;
      out.push_back({f, values[f][rank]});
      any = true;
    }
    if (!any) break;
  }
  return out;
}

DecisionTree align_cart_to_topology(const CartTree& c, int depth, const RestrictedSplits& restricted) {
  const Topology topo(depth);
  if (c.grown_depth() > depth) throw std::invalid_argument("align: CART tree deeper than the topology");
  if (restricted.n_nodes() != topo.n_internal()) throw std::invalid_argument("align: split sets do not match the topology");
  DecisionTree t;
  t.depth = depth;
  t.splits.resize(topo.n_internal());
  t.targets.resize(topo.n_leaves());
  auto cart_node = [&](NodeId n) -> const CartNode* {
    return n < c.nodes.size() && c.nodes[n].present ? &c.nodes[n] : nullptr;
  };
  std::vector<Split> ancestors;
  auto fill = [&](auto&& self, NodeId n, int inherited) -> void {
    const CartNode* cn = cart_node(n);
    if (cn) inherited = cn->majority;
    if (topo.is_leaf(n)) {
      t.targets[topo.leaf_index(n)] = inherited;
      return;
    }
    Split s;
    if (cn && !cn->is_leaf) {
      s = cn->split;
    } else {
      const auto& candidates = restricted.at(n);
      auto it = std::find_if(candidates.begin(), candidates.end(), [&](const Split& a) {
        return std::find(ancestors.begin(), ancestors.end(), a) == ancestors.end();
      });
      if (it == candidates.end())
        throw std::runtime_error("align: no split at node " + std::to_string(n) + " distinct from its ancestors");
      s = *it;
    }
    t.splits[n] = s;
    ancestors.push_back(s);
    self(self, 2 * n + 1, inherited);
    self(self, 2 * n + 2, inherited);
    ancestors.pop_back();
  };
  fill(fill, 0, 0);
  return t;
}

SamplingResult run_threshold_sampling(const Dataset& d, std::span<const std::size_t> train_rows, int depth,
                                      const SamplingParams& params) {
  params.validate(depth);
  if (train_rows.empty()) throw std::invalid_argument("sampling: no training rows");
  const Topology topo(depth);
  const auto n_int = topo.n_internal();
  const auto q = params.q.empty() ? default_q(depth) : params.q;
  const std::size_t n = train_rows.size();
  const auto sub = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(params.alpha * static_cast<double>(n) - 1e-9)), 1, n);
  const std::size_t cap = params.max_iterations ? params.max_iterations : 50 * static_cast<std::size_t>(params.tau);

  CartParams cart;
  cart.max_depth = depth;

  SamplingResult out;
  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> pool(train_rows.begin(), train_rows.end());
  std::set<Split> root_seen;
  int stall = 0;
  while (stall < params.tau && out.iterations < cap) {
    // partial Fisher-Yates: first `sub` entries form a uniform subset
    for (std::size_t i = 0; i < sub; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::span<const std::size_t> sample(pool.data(), sub);
    const auto tree = build_cart(d, sample, cart);
    bool known_root = true;
    if (!tree.nodes[0].is_leaf) known_root = root_seen.contains(tree.nodes[0].split);
    for (NodeId j = 0; j < n_int && j < tree.nodes.size(); ++j) {
      const auto& nd = tree.nodes[j];
      if (!nd.present || nd.is_leaf) continue;
      ++out.frequencies[{j, nd.split}];
      if (j == 0) root_seen.insert(nd.split);
    }
    stall = known_root ? stall + 1 : 0;
    ++out.iterations;
  }

  out.full_cart = build_cart(d, train_rows, cart);

  std::map<Split, std::size_t> global;
  std::vector<std::vector<std::pair<std::size_t, Split>>> by_node(n_int);
  for (const auto& [key, w] : out.frequencies) {
    by_node[key.first].push_back({w, key.second});
    global[key.second] += w;
  }
  auto by_frequency = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::vector<std::pair<std::size_t, Split>> global_sorted;
  for (const auto& [s, w] : global) global_sorted.push_back({w, s});
  std::sort(global_sorted.begin(), global_sorted.end(), by_frequency);

  const auto& full = out.full_cart.nodes;
  std::vector<Split> fallback;
  std::vector<std::vector<Split>> per_node(n_int);
  for (NodeId j = 0; j < n_int; ++j) {
    auto& cand = by_node[j];
    std::sort(cand.begin(), cand.end(), by_frequency);
    auto& s = per_node[j];
    for (std::size_t i = 0; i < cand.size() && i < q[j]; ++i) s.push_back(cand[i].second);
    if (j < full.size() && full[j].present && !full[j].is_leaf &&
        std::find(s.begin(), s.end(), full[j].split) == s.end())
      s.push_back(full[j].split);
    // at least k candidates per node
    const auto needed = static_cast<std::size_t>(depth);
    for (std::size_t i = 0; s.size() < needed && i < global_sorted.size(); ++i)
      if (std::find(s.begin(), s.end(), global_sorted[i].second) == s.end()) s.push_back(global_sorted[i].second);
    if (s.size() < needed) {
      if (fallback.empty()) fallback = fallback_splits(d, train_rows, needed + 1);
      for (std::size_t i = 0; s.size() < needed && i < fallback.size(); ++i)
        if (std::find(s.begin(), s.end(), fallback[i]) == s.end()) s.push_back(fallback[i]);
    }
  }
  out.splits = RestrictedSplits(std::move(per_node));
  out.warm_tree = align_cart_to_topology(out.full_cart, depth, out.splits);
  out.warm_paths = paths_of_tree(out.warm_tree);
  return out;
}

void write_splits(std::ostream& os, const RestrictedSplits& s, const SplitFrequencies& w) {
  os << "node,feature,threshold,frequency\n";
  for (NodeId j = 0; j < s.n_nodes(); ++j)
    for (const auto& a : s.at(j)) {
      auto it = w.find({j, a});
      os << j << ',' << a.feature << ',' << std::setprecision(17) << a.threshold << ','
         << (it == w.end() ? 0 : it->second) << '\n';
    }
}

}  // namespace cgtree
