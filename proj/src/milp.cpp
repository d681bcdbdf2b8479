#include "cgtree/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace cgtree::lp {

const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::optimal: return "optimal";
    case MilpStatus::infeasible: return "infeasible";
    case MilpStatus::unbounded: return "unbounded";
    case MilpStatus::limit: return "limit";
  }
  return "?";
}

namespace {

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  std::size_t id;
  double parent_bound;
  std::vector<BoundChange> changes;
  Basis warm;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.parent_bound != b.parent_bound) return a.parent_bound < b.parent_bound;
    return a.id > b.id;
  }
};

}  // namespace

MilpResult solve_milp(const MilpSpec& spec) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  LinearProgram work = spec.program;
  for (int v : spec.integer_vars)
    if (v < 0 || v >= work.n_vars()) throw std::out_of_range("milp: integer variable index out of range");

  MilpResult res;
  if (spec.incumbent) {
    if (static_cast<int>(spec.incumbent->size()) != work.n_vars())
      throw std::invalid_argument("milp: incumbent has wrong dimension");
    res.x = *spec.incumbent;
    res.objective = work.objective(res.x);
  }

  std::priority_queue<Node, std::vector<Node>, WorseNode> open;
  open.push(Node{0, kInf, {}, {}});
  std::size_t next_id = 1;
  bool hit_limit = false;
  bool root = true;

  while (!open.empty()) {
    if (res.nodes >= spec.node_limit || elapsed() > spec.time_limit_seconds) {
      hit_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (res.has_solution() && node.parent_bound <= res.objective + spec.prune_tol) continue;
    ++res.nodes;

    std::vector<BoundChange> saved;
    for (const auto& c : node.changes) {
      saved.push_back({c.var, work.lower(c.var), work.upper(c.var)});
      work.set_bounds(c.var, c.lower, c.upper);
    }
    auto lp_opt = spec.lp;
    lp_opt.time_limit_seconds = std::min(lp_opt.time_limit_seconds, spec.time_limit_seconds - elapsed());
    const auto sol = solve_lp(work, node.warm.empty() ? nullptr : &node.warm, lp_opt);
    for (auto it = saved.rbegin(); it != saved.rend(); ++it) work.set_bounds(it->var, it->lower, it->upper);

    if (root) {
      root = false;
      if (sol.status == LpStatus::unbounded) {
        res.status = MilpStatus::unbounded;
        return res;
      }
      if (sol.status == LpStatus::optimal) res.root_bound = sol.objective;
    }
    if (sol.status == LpStatus::infeasible) continue;
    if (sol.status != LpStatus::optimal) {
      // cannot certify this subtree
      hit_limit = true;
      continue;
    }
    if (res.has_solution() && sol.objective <= res.objective + spec.prune_tol) continue;

    int branch = -1;
    double worst = spec.integrality_tol;
    for (int v : spec.integer_vars) {
      const double xv = sol.x[static_cast<std::size_t>(v)];
      const double frac = std::abs(xv - std::round(xv));
      if (frac > worst) {
        worst = frac;
        branch = v;
      }
    }
    if (branch < 0) {
      res.x = sol.x;
      for (int v : spec.integer_vars) res.x[static_cast<std::size_t>(v)] = std::round(res.x[static_cast<std::size_t>(v)]);
      res.objective = sol.objective;
      continue;
    }
    const double xv = sol.x[static_cast<std::size_t>(branch)];
    const double lo = work.lower(branch), up = work.upper(branch);
    auto current_bounds = [&](int v) {
      for (auto it = node.changes.rbegin(); it != node.changes.rend(); ++it)
        if (it->var == v) return std::pair{it->lower, it->upper};
      return std::pair{lo, up};
    };
    const auto [cur_lo, cur_up] = current_bounds(branch);
    Node down{next_id++, sol.objective, node.changes, sol.basis};
    down.changes.push_back({branch, cur_lo, std::floor(xv)});
    Node upn{next_id++, sol.objective, std::move(node.changes), sol.basis};
    upn.changes.push_back({branch, std::ceil(xv), cur_up});
    open.push(std::move(down));
    open.push(std::move(upn));
  }

  double open_bound = -kInf;
  for (; !open.empty(); open.pop()) open_bound = std::max(open_bound, open.top().parent_bound);
  if (hit_limit) {
    res.status = MilpStatus::limit;
    res.bound = std::max(open_bound, res.objective);
    if (!std::isfinite(res.bound)) res.bound = res.root_bound;
    res.proven_optimal = false;
    return res;
  }
  res.status = res.has_solution() ? MilpStatus::optimal : MilpStatus::infeasible;
  res.proven_optimal = true;
  res.bound = res.has_solution() ? res.objective : -kInf;
  return res;
}

}  // namespace cgtree::lp
