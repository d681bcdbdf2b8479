#include "cgtree/pricing.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace cgtree {

PricingContext::PricingContext(const MasterModel& m, DualValues duals) : m_(&m), duals_(std::move(duals)) {
  const auto& topo = m.topology();
  if (duals_.alpha.size() != topo.n_leaves() || duals_.beta.size() != m.n_rows() ||
      duals_.gamma.size() != topo.n_leaves())
    throw std::invalid_argument("pricing: duals do not match the master");
}

double PricingContext::beta_sum(const RowSet& rows) const {
  double s = 0;
  rows.for_each([&](std::size_t r) { s += duals_.beta[r]; });
  return s;
}

std::vector<double> PricingContext::reduced_costs_by_target(std::size_t leaf_pos, std::span<const std::size_t> split_idx,
                                                            const RowSet& rows) const {
  double base = -duals_.alpha[leaf_pos] - beta_sum(rows);
  for (std::size_t h = 0; h < split_idx.size(); ++h) base -= duals_.gamma[leaf_pos][h][split_idx[h]];
  std::vector<double> rc(static_cast<std::size_t>(m_->data().n_classes()));
  for (std::size_t t = 0; t < rc.size(); ++t)
    rc[t] = static_cast<double>(intersection_count(rows, m_->class_rows(static_cast<int>(t)))) + base;
  return rc;
}

double PricingContext::reduced_cost(const DecisionPath& p) const {
  const auto idx = m_->split_indices(p);
  const auto rows = m_->rows_of(p.leaf, idx);
  return reduced_costs_by_target(topology().leaf_index(p.leaf), idx, rows)[static_cast<std::size_t>(p.target)];
}

double reduced_cost_of(const PricingContext& ctx, const DecisionPath& p) { return ctx.reduced_cost(p); }

namespace {

constexpr double kPositive = 1e-6;

bool better(const PricedPath& a, const PricedPath& b) {
  if (a.reduced_cost != b.reduced_cost) return a.reduced_cost > b.reduced_cost;
  return a.path < b.path;
}

int best_target(std::span<const double> rc) {
  return static_cast<int>(std::max_element(rc.begin(), rc.end()) - rc.begin());
}

}  // namespace

HeuristicState::HeuristicState(const HeuristicParams& p, std::size_t n_leaves, std::uint64_t seed)
    : params(p), leaf_weights(n_leaves, 1.0), rng(seed) {
  if (p.pool_capacity == 0 || p.leaves_per_round == 0 || p.columns_per_round == 0 || p.failure_threshold < 1)
    throw std::invalid_argument("heuristic: sizes and failure threshold must be positive");
}

void HeuristicState::reprioritize(std::span<const double> best_per_leaf) {
  pool.clear();
  for (std::size_t l = 0; l < leaf_weights.size() && l < best_per_leaf.size(); ++l)
    leaf_weights[l] = std::max(params.min_leaf_weight, best_per_leaf[l]);
}

std::vector<PricedPath> heuristic_generate(const PricingContext& ctx, HeuristicState& state,
                                           const std::function<bool(const DecisionPath&)>& known) {
  const auto& topo = ctx.topology();
  const auto& m = ctx.master();
  const auto& hp = state.params;

  std::map<DecisionPath, double> pool;
  for (const auto& e : state.pool) pool[e.path] = ctx.reduced_cost(e.path);

  std::discrete_distribution<std::size_t> pick_leaf(state.leaf_weights.begin(), state.leaf_weights.end());
  std::vector<std::size_t> idx(static_cast<std::size_t>(topo.depth()));
  for (std::size_t draw = 0; draw < hp.leaves_per_round; ++draw) {
    const auto pos = pick_leaf(state.rng);
    const NodeId leaf = topo.leaf(pos);
    const auto nodes = topo.path_nodes(leaf);
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
      std::vector<Split> chosen;
      for (std::size_t h = 0; h < nodes.size(); ++h) {
        const auto& s = m.splits().at(nodes[h]);
        std::uniform_int_distribution<std::size_t> u(0, s.size() - 1);
        idx[h] = u(state.rng);
        chosen.push_back(s[idx[h]]);
      }
      ok = splits_distinct(chosen);
      if (!ok) continue;
      const auto rows = m.rows_of(leaf, idx);
      const auto rc = ctx.reduced_costs_by_target(pos, idx, rows);
      const int t = best_target(rc);
      pool[DecisionPath{leaf, std::move(chosen), t}] = rc[static_cast<std::size_t>(t)];
    }
  }

  std::vector<PricedPath> entries;
  for (auto& [p, rc] : pool) entries.push_back({p, rc});
  std::sort(entries.begin(), entries.end(), better);

  std::vector<PricedPath> emitted, kept;
  for (auto& e : entries) {
    if (emitted.size() < hp.columns_per_round && e.reduced_cost > kPositive && !(known && known(e.path)))
      emitted.push_back(std::move(e));
    else
      kept.push_back(std::move(e));
  }
  if (kept.size() > hp.pool_capacity) kept.resize(hp.pool_capacity);
  state.pool = std::move(kept);
  if (emitted.empty()) ++state.failures;
  return emitted;
}

namespace {

struct Enumerator {
  const PricingContext& ctx;
  const MasterModel& m;
  NodeId leaf;
  std::size_t pos;
  std::vector<NodeId> nodes;
  std::vector<bool> left;
  std::vector<std::size_t> idx;
  std::vector<Split> chosen;
  std::vector<RowSet> partial;
  std::vector<PricedPath> best;

  Enumerator(const PricingContext& c, NodeId l)
      : ctx(c), m(c.master()), leaf(l), pos(c.topology().leaf_index(l)), nodes(c.topology().path_nodes(l)),
        left(c.topology().goes_left(l)), idx(nodes.size()), chosen(nodes.size()), partial(nodes.size() + 1) {
    partial[0] = RowSet::all(m.n_rows());
    best.resize(static_cast<std::size_t>(m.data().n_classes()));
    for (std::size_t t = 0; t < best.size(); ++t) best[t] = {{leaf, {}, static_cast<int>(t)}, -lp::kInf};
  }

  void run(std::size_t h) {
    if (h == nodes.size()) {
      const auto rc = ctx.reduced_costs_by_target(pos, idx, partial[h]);
      for (std::size_t t = 0; t < rc.size(); ++t)
        if (rc[t] > best[t].reduced_cost) best[t] = {{leaf, chosen, static_cast<int>(t)}, rc[t]};
      return;
    }
    const auto& s = m.splits().at(nodes[h]);
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (std::find(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(h), s[a]) !=
          chosen.begin() + static_cast<std::ptrdiff_t>(h))
        continue;
      idx[h] = a;
      chosen[h] = s[a];
      partial[h + 1] = partial[h];
      if (left[h])
        partial[h + 1] &= m.mask(nodes[h], a);
      else
        partial[h + 1].subtract(m.mask(nodes[h], a));
      run(h + 1);
    }
  }
};

}  // namespace

std::vector<PricedPath> exact_enumerate_leaf(const PricingContext& ctx, NodeId leaf) {
  Enumerator e(ctx, leaf);
  e.run(0);
  if (e.best[0].path.splits.empty()) throw std::runtime_error("pricing: no distinct split tuple for leaf " + std::to_string(leaf));
  return e.best;
}

PricedPath exact_enumerate(const PricingContext& ctx, NodeId leaf, int target) {
  return exact_enumerate_leaf(ctx, leaf).at(static_cast<std::size_t>(target));
}

lp::MilpSpec pricing_program(const PricingContext& ctx, NodeId leaf, int target) {
  const auto& m = ctx.master();
  const auto& topo = ctx.topology();
  const auto& duals = ctx.duals();
  const auto pos = topo.leaf_index(leaf);
  const auto nodes = topo.path_nodes(leaf);
  const auto left = topo.goes_left(leaf);
  const auto k = nodes.size();
  const auto n = m.n_rows();

  lp::MilpSpec spec;
  auto& p = spec.program;
  std::vector<std::vector<int>> u(k);
  for (std::size_t h = 0; h < k; ++h)
    for (std::size_t a = 0; a < m.splits().at(nodes[h]).size(); ++a) {
      u[h].push_back(p.add_variable(-duals.gamma[pos][h][a], 0.0, 1.0,
                                    "u_" + std::to_string(nodes[h]) + "_" + std::to_string(a)));
      spec.integer_vars.push_back(u[h].back());
    }
  std::vector<int> y(n);
  for (std::size_t r = 0; r < n; ++r)
    y[r] = p.add_variable((m.data().target(r) == target ? 1.0 : 0.0) - duals.beta[r], 0.0, lp::kInf,
                          "y_" + std::to_string(r));

  // exactly one split per node of the path
  for (std::size_t h = 0; h < k; ++h) {
    std::vector<lp::Entry> e;
    for (int v : u[h]) e.push_back({v, 1.0});
    p.add_constraint(e, lp::Sense::eq, 1.0);
  }
  // a row reaches the leaf only if it takes the path's direction everywhere,
  // and must reach it when it does
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<lp::Entry> all;
    for (std::size_t h = 0; h < k; ++h) {
      std::vector<lp::Entry> e{{y[r], 1.0}};
      for (std::size_t a = 0; a < u[h].size(); ++a) {
        if (m.mask(nodes[h], a).test(r) != left[h]) continue;
        e.push_back({u[h][a], -1.0});
        all.push_back({u[h][a], 1.0});
      }
      p.add_constraint(e, lp::Sense::le, 0.0);
    }
    all.push_back({y[r], -1.0});
    p.add_constraint(all, lp::Sense::le, static_cast<double>(k) - 1.0);
  }
  // a split may appear at most once along the path
  std::map<Split, std::vector<int>> uses;
  for (std::size_t h = 0; h < k; ++h)
    for (std::size_t a = 0; a < u[h].size(); ++a) uses[m.splits().at(nodes[h])[a]].push_back(u[h][a]);
  for (const auto& [s, vars] : uses) {
    if (vars.size() < 2) continue;
    std::vector<lp::Entry> e;
    for (int v : vars) e.push_back({v, 1.0});
    p.add_constraint(e, lp::Sense::le, 1.0);
  }
  return spec;
}

MilpPriced milp_price(const PricingContext& ctx, NodeId leaf, int target, double time_limit_seconds) {
  auto spec = pricing_program(ctx, leaf, target);
  spec.time_limit_seconds = time_limit_seconds;
  const auto res = lp::solve_milp(spec);
  if (!res.has_solution()) throw std::runtime_error(std::string("pricing MILP: no solution (") + lp::to_string(res.status) + ")");

  const auto& m = ctx.master();
  const auto nodes = ctx.topology().path_nodes(leaf);
  MilpPriced out;
  out.best.path.leaf = leaf;
  out.best.path.target = target;
  int var = 0;
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    const auto& s = m.splits().at(nodes[h]);
    std::optional<Split> pick;
    for (std::size_t a = 0; a < s.size(); ++a, ++var)
      if (res.x[static_cast<std::size_t>(var)] > 0.5) pick = s[a];
    if (!pick) throw std::runtime_error("pricing MILP: no split selected at node " + std::to_string(nodes[h]));
    out.best.path.splits.push_back(*pick);
  }
  out.best.reduced_cost = ctx.reduced_cost(out.best.path);
  out.proven_optimal = res.proven_optimal;
  out.nodes = res.nodes;
  return out;
}

const char* to_string(PricingMode m) {
  switch (m) {
    case PricingMode::heuristic: return "heuristic";
    case PricingMode::exact_enum: return "exact_enum";
    case PricingMode::milp: return "milp";
  }
  return "?";
}

PricingRound price_all(const PricingContext& ctx, PricingMode mode,
                       std::optional<std::chrono::steady_clock::time_point> deadline, std::ostream* trace,
                       std::size_t round) {
  if (mode == PricingMode::heuristic) throw std::invalid_argument("price_all: heuristic pricing goes through heuristic_generate");
  const auto& topo = ctx.topology();
  const int T = ctx.master().data().n_classes();
  using clock = std::chrono::steady_clock;
  auto expired = [&] { return deadline && clock::now() >= *deadline; };

  PricingRound out;
  out.best_per_leaf.assign(topo.n_leaves(), -lp::kInf);
  std::size_t solved = 0;
  auto record = [&](std::size_t pos, PricedPath p) {
    if (trace)
      *trace << round << ',' << p.path.leaf << ',' << p.path.target << ',' << std::setprecision(17) << p.reduced_cost
             << '\n';
    out.max_reduced_cost = std::max(out.max_reduced_cost, p.reduced_cost);
    out.best_per_leaf[pos] = std::max(out.best_per_leaf[pos], p.reduced_cost);
    out.best.push_back(std::move(p));
    ++solved;
  };

  for (std::size_t pos = 0; pos < topo.n_leaves(); ++pos) {
    const NodeId leaf = topo.leaf(pos);
    if (mode == PricingMode::exact_enum) {
      if (expired()) {
        out.complete = false;
        return out;
      }
      for (auto& p : exact_enumerate_leaf(ctx, leaf)) record(pos, std::move(p));
      continue;
    }
    for (int t = 0; t < T; ++t) {
      if (solved % 10 == 0 && expired()) {
        out.complete = false;
        return out;
      }
      double remaining = lp::kInf;
      if (deadline) remaining = std::chrono::duration<double>(*deadline - clock::now()).count();
      auto r = milp_price(ctx, leaf, t, std::max(0.0, remaining));
      if (!r.proven_optimal) out.complete = false;
      record(pos, std::move(r.best));
    }
  }
  return out;
}

}  // namespace cgtree
