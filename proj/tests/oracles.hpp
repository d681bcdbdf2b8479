#ifndef CGTREE_TESTS_ORACLES_HPP
#define CGTREE_TESTS_ORACLES_HPP

// Brute-force reference implementations used by the tests.

#include "cgtree/dataset.hpp"
#include "cgtree/lp.hpp"
#include "cgtree/master.hpp"
#include "cgtree/sampling.hpp"
#include "cgtree/tree.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using cgtree::Dataset;
using cgtree::Split;

/// Random dataset with small integer feature values (so splits collide often).
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t rows, std::size_t features, int classes,
                              int levels = 5) {
  cgtree::Matrix v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(features));
  std::vector<int> t(rows);
  std::uniform_int_distribution<int> val(0, levels - 1), cls(0, classes - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t f = 0; f < features; ++f)
      v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = val(rng);
    t[r] = cls(rng);
  }
  return Dataset(v, t, classes);
}

inline std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> r(d.n_rows());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
  return r;
}

/// Leaf reached by a row in a heap-ordered tree with `splits` per internal node.
inline std::size_t route(const std::vector<Split>& splits, std::span<const double> row) {
  std::size_t n = 0;
  while (n < splits.size()) n = row[splits[n].feature] <= splits[n].threshold ? 2 * n + 1 : 2 * n + 2;
  return n - splits.size();
}

/// Correct predictions of the best targets for fixed node splits.
inline std::size_t best_count_for(const std::vector<Split>& splits, const Dataset& d) {
  const std::size_t leaves = splits.size() + 1;
  std::vector<std::vector<std::size_t>> counts(leaves, std::vector<std::size_t>(static_cast<std::size_t>(d.n_classes())));
  for (std::size_t r = 0; r < d.n_rows(); ++r) ++counts[route(splits, d.row(r))][static_cast<std::size_t>(d.target(r))];
  std::size_t total = 0;
  for (const auto& c : counts) total += *std::max_element(c.begin(), c.end());
  return total;
}

/// Maximum number of correctly classified rows over every assignment of
/// splits from S_j to the internal nodes such that no root-to-leaf path
/// repeats a split.
inline std::size_t best_tree_count(const cgtree::RestrictedSplits& s, const Dataset& d) {
  const std::size_t n_int = s.n_nodes();
  std::vector<Split> chosen(n_int);
  std::size_t best = 0;
  auto ancestors_differ = [&](std::size_t j) {
    for (std::size_t a = j; a > 0;) {
      a = (a - 1) / 2;
      if (chosen[a] == chosen[j]) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == n_int) {
      best = std::max(best, best_count_for(chosen, d));
      return;
    }
    for (const auto& sp : s.at(j)) {
      chosen[j] = sp;
      if (ancestors_differ(j)) self(self, j + 1);
    }
  };
  rec(rec, 0);
  return best;
}

/// Optimum of max c.x, Ax = b, l <= x <= u by enumerating every basis and
/// every bound assignment of the nonbasic variables. Requires finite upper
/// bounds or a bounded feasible region.
struct VertexOptimum {
  double objective;
  std::vector<double> x;
};

inline std::optional<VertexOptimum> enumerate_vertices(const cgtree::lp::LinearProgram& p, double tol = 1e-9) {
  const int m = p.n_rows(), n = p.n_vars();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  for (int j = 0; j < n; ++j)
    for (const auto& e : p.column(j)) A(e.index, j) = e.value;
  for (int i = 0; i < m; ++i) b[i] = p.rhs(i);
  const auto rank = Eigen::FullPivLU<Eigen::MatrixXd>(A).rank();

  std::optional<VertexOptimum> best;
  std::vector<int> basis;
  auto try_basis = [&] {
    std::vector<int> nonbasic;
    for (int j = 0; j < n; ++j)
      if (std::find(basis.begin(), basis.end(), j) == basis.end()) nonbasic.push_back(j);
    Eigen::MatrixXd B(m, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = A.col(basis[k]);
    std::optional<Eigen::FullPivLU<Eigen::MatrixXd>> lu;
    if (!basis.empty()) {
      lu.emplace(B);
      if (lu->rank() != static_cast<Eigen::Index>(basis.size())) return;
    }
    std::vector<int> finite_upper;
    for (int j : nonbasic)
      if (std::isfinite(p.upper(j))) finite_upper.push_back(j);
    const std::size_t combos = std::size_t{1} << finite_upper.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      std::vector<double> x(static_cast<std::size_t>(n));
      for (int j : nonbasic) x[static_cast<std::size_t>(j)] = p.lower(j);
      for (std::size_t k = 0; k < finite_upper.size(); ++k)
        if (mask >> k & 1U) x[static_cast<std::size_t>(finite_upper[k])] = p.upper(finite_upper[k]);
      Eigen::VectorXd rhs = b;
      for (int j : nonbasic) rhs -= A.col(j) * x[static_cast<std::size_t>(j)];
      const Eigen::VectorXd xb = lu ? Eigen::VectorXd(lu->solve(rhs)) : Eigen::VectorXd(0);
      if (m > 0 && (B * xb - rhs).cwiseAbs().maxCoeff() > 1e-7) continue;
      bool ok = true;
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const int j = basis[k];
        const double v = xb[static_cast<Eigen::Index>(k)];
        if (v < p.lower(j) - tol || v > p.upper(j) + tol) ok = false;
        x[static_cast<std::size_t>(j)] = v;
      }
      if (!ok) continue;
      const double z = p.objective(x);
      if (!best || z > best->objective) best = VertexOptimum{z, x};
    }
  };
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<Eigen::Index>(basis.size()) == rank) {
      try_basis();
      return;
    }
    for (int j = start; j < n; ++j) {
      basis.push_back(j);
      self(self, j + 1);
      basis.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

/// Random equality-form program with box bounds. When `feasible` the
/// right-hand side comes from a point inside the box.
inline cgtree::lp::LinearProgram random_box_lp(std::mt19937_64& rng, bool feasible) {
  std::uniform_int_distribution<int> rows(1, 4), coef(-3, 3), cost(-5, 5), ub(1, 4), pick(0, 3);
  const int m = rows(rng);
  const int n = m + std::uniform_int_distribution<int>(1, 3)(rng);
  cgtree::lp::LinearProgram p;
  for (int i = 0; i < m; ++i) p.add_row(0.0);
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::vector<cgtree::lp::Entry> col;
    for (int i = 0; i < m; ++i)
      if (pick(rng) != 0) col.push_back({i, static_cast<double>(coef(rng))});
    const double u = ub(rng);
    p.add_column(cost(rng), col, 0.0, u);
    x0[static_cast<std::size_t>(j)] = pick(rng) < 2 ? std::round(std::uniform_real_distribution<double>(0, u)(rng)) : 0.0;
  }
  cgtree::lp::LinearProgram out;
  std::vector<double> b(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < n; ++j)
    for (const auto& e : p.column(j)) b[static_cast<std::size_t>(e.index)] += e.value * x0[static_cast<std::size_t>(j)];
  for (int i = 0; i < m; ++i) out.add_row(feasible ? b[static_cast<std::size_t>(i)] : static_cast<double>(coef(rng) * 3));
  for (int j = 0; j < n; ++j) out.add_column(p.cost(j), p.column(j), p.lower(j), p.upper(j));
  return out;
}

/// Random feasible program in standard form (x >= 0, no upper bounds) whose
/// last row sum(w_j x_j) + s = U bounds the feasible region.
inline cgtree::lp::LinearProgram random_standard_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rows(1, 4), coef(-3, 3), cost(-5, 5), pick(0, 3), w(1, 3), val(0, 2);
  const int m = rows(rng);
  const int n = m + std::uniform_int_distribution<int>(1, 3)(rng);
  std::vector<std::vector<cgtree::lp::Entry>> cols(static_cast<std::size_t>(n));
  std::vector<double> x0(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(m + 1), 0.0);
  for (int j = 0; j < n; ++j) {
    x0[static_cast<std::size_t>(j)] = pick(rng) == 0 ? 0.0 : val(rng);
    for (int i = 0; i < m; ++i)
      if (pick(rng) != 0) cols[static_cast<std::size_t>(j)].push_back({i, static_cast<double>(coef(rng))});
    cols[static_cast<std::size_t>(j)].push_back({m, static_cast<double>(w(rng))});
    for (const auto& e : cols[static_cast<std::size_t>(j)])
      b[static_cast<std::size_t>(e.index)] += e.value * x0[static_cast<std::size_t>(j)];
  }
  cgtree::lp::LinearProgram p;
  for (int i = 0; i < m; ++i) p.add_row(b[static_cast<std::size_t>(i)]);
  p.add_row(b[static_cast<std::size_t>(m)] + val(rng));
  for (int j = 0; j < n; ++j) p.add_column(cost(rng), cols[static_cast<std::size_t>(j)]);
  const cgtree::lp::Entry slack{m, 1.0};
  p.add_column(0.0, std::span(&slack, 1));
  return p;
}

/// Integer optimum by enumerating every value of the integer variables
/// (each must have small finite integer bounds) and solving the rest by
/// vertex enumeration.
inline std::optional<double> enumerate_integer(const cgtree::lp::LinearProgram& p, const std::vector<int>& ints) {
  std::optional<double> best;
  auto work = p;
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == ints.size()) {
      if (auto v = enumerate_vertices(work); v && (!best || v->objective > *best)) best = v->objective;
      return;
    }
    const int j = ints[k];
    for (auto v = static_cast<int>(std::ceil(p.lower(j))); v <= static_cast<int>(std::floor(p.upper(j))); ++v) {
      work.set_bounds(j, v, v);
      self(self, k + 1);
    }
    work.set_bounds(j, p.lower(j), p.upper(j));
  };
  rec(rec, 0);
  return best;
}

/// Exhaustive unweighted Gini scan over (feature, observed value) with at
/// least one row on each side; ties keep the lowest feature, then threshold.
struct ScanResult {
  Split split;
  double score;
};

inline std::optional<ScanResult> gini_scan(const Dataset& d, const std::vector<std::size_t>& rows) {
  auto gini_times_n = [&](const std::vector<std::size_t>& part) {
    if (part.empty()) return 0.0;
    std::vector<double> c(static_cast<std::size_t>(d.n_classes()), 0.0);
    for (auto r : part) c[static_cast<std::size_t>(d.target(r))] += 1;
    double s = 0;
    for (double v : c) s += (v / static_cast<double>(part.size())) * (v / static_cast<double>(part.size()));
    return static_cast<double>(part.size()) * (1.0 - s);
  };
  std::optional<ScanResult> best;
  for (std::size_t f = 0; f < d.n_features(); ++f) {
    std::vector<double> values;
    for (auto r : rows) values.push_back(d.value(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (double v : values) {
      std::vector<std::size_t> l, r;
      for (auto row : rows) (d.value(row, f) <= v ? l : r).push_back(row);
      if (l.empty() || r.empty()) continue;
      const double s = (gini_times_n(l) + gini_times_n(r)) / static_cast<double>(rows.size());
      if (!best || s < best->score - 1e-12) best = ScanResult{{f, v}, s};
    }
  }
  return best;
}

/// Whether a row reaches the leaf of `p`, evaluated split by split.
inline bool reaches(const cgtree::DecisionPath& p, std::span<const double> row) {
  std::size_t n = 0;
  for (const auto& s : p.splits) n = row[s.feature] <= s.threshold ? 2 * n + 1 : 2 * n + 2;
  return n == p.leaf;
}

/// Reduced cost of a path from the duals, routing every row individually.
inline double reduced_cost(const cgtree::MasterModel& m, const cgtree::DualValues& y, const cgtree::DecisionPath& p) {
  const auto& d = m.data();
  const auto& topo = m.topology();
  const auto l = topo.leaf_index(p.leaf);
  const auto nodes = topo.path_nodes(p.leaf);
  double rc = -y.alpha[l];
  for (std::size_t r = 0; r < d.n_rows(); ++r)
    if (reaches(p, d.row(r))) rc += (d.target(r) == p.target ? 1.0 : 0.0) - y.beta[r];
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    const auto& sj = m.splits().at(nodes[h]);
    const auto a = static_cast<std::size_t>(std::find(sj.begin(), sj.end(), p.splits[h]) - sj.begin());
    rc -= y.gamma[l][h][a];
  }
  return rc;
}

/// Largest reduced cost over every split tuple (distinct along the path)
/// for a fixed leaf and target.
inline double best_reduced_cost(const cgtree::MasterModel& m, const cgtree::DualValues& y, cgtree::NodeId leaf,
                                int target) {
  const auto nodes = m.topology().path_nodes(leaf);
  cgtree::DecisionPath p{leaf, std::vector<Split>(nodes.size()), target};
  double best = -cgtree::lp::kInf;
  auto rec = [&](auto&& self, std::size_t h) -> void {
    if (h == nodes.size()) {
      best = std::max(best, reduced_cost(m, y, p));
      return;
    }
    for (const auto& s : m.splits().at(nodes[h])) {
      if (std::find(p.splits.begin(), p.splits.begin() + static_cast<std::ptrdiff_t>(h), s) !=
          p.splits.begin() + static_cast<std::ptrdiff_t>(h))
        continue;
      p.splits[h] = s;
      self(self, h + 1);
    }
  };
  rec(rec, 0);
  return best;
}

/// Random split sets of `per_node` observed-value splits per internal node
/// and a random tree over them with distinct splits along every path.
struct RandomMaster {
  cgtree::RestrictedSplits splits;
  cgtree::DecisionTree tree;
};

inline RandomMaster random_master_input(std::mt19937_64& rng, const Dataset& d, int depth, std::size_t per_node) {
  const cgtree::Topology topo(depth);
  std::vector<Split> universe;
  for (std::size_t f = 0; f < d.n_features(); ++f)
    for (std::size_t r = 0; r < d.n_rows(); ++r) universe.push_back({f, d.value(r, f)});
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  const auto want = std::min(per_node, universe.size());
  std::vector<std::vector<Split>> sets(topo.n_internal());
  for (auto& s : sets) {
    std::shuffle(universe.begin(), universe.end(), rng);
    s.assign(universe.begin(), universe.begin() + static_cast<std::ptrdiff_t>(want));
    std::sort(s.begin(), s.end());
  }
  RandomMaster out;
  out.tree.depth = depth;
  out.tree.splits.resize(topo.n_internal());
  for (std::size_t j = 0; j < topo.n_internal(); ++j) {
    std::vector<Split> options;
    for (const auto& s : sets[j]) {
      bool used = false;
      for (std::size_t a = j; a > 0;) {
        a = (a - 1) / 2;
        used = used || out.tree.splits[a] == s;
      }
      if (!used) options.push_back(s);
    }
    if (options.empty()) {
      // guarantee a usable split by adding one not on the ancestor chain
      for (const auto& s : universe) {
        bool used = false;
        for (std::size_t a = j; a > 0;) {
          a = (a - 1) / 2;
          used = used || out.tree.splits[a] == s;
        }
        if (!used) {
          sets[j].push_back(s);
          std::sort(sets[j].begin(), sets[j].end());
          options.push_back(s);
          break;
        }
      }
    }
    out.tree.splits[j] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  }
  std::uniform_int_distribution<int> cls(0, d.n_classes() - 1);
  for (std::size_t l = 0; l < topo.n_leaves(); ++l) out.tree.targets.push_back(cls(rng));
  out.splits = cgtree::RestrictedSplits(sets);
  return out;
}

/// Random duals with the master's shapes, each entry uniform in [-scale, scale].
inline cgtree::DualValues random_duals(std::mt19937_64& rng, const cgtree::MasterModel& m, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  cgtree::DualValues y;
  const auto& topo = m.topology();
  for (std::size_t l = 0; l < topo.n_leaves(); ++l) y.alpha.push_back(u(rng));
  for (std::size_t r = 0; r < m.n_rows(); ++r) y.beta.push_back(u(rng));
  y.gamma.resize(topo.n_leaves());
  for (std::size_t l = 0; l < topo.n_leaves(); ++l)
    for (auto j : topo.path_nodes(topo.leaf(l))) {
      auto& g = y.gamma[l].emplace_back();
      for (std::size_t a = 0; a < m.splits().at(j).size(); ++a) g.push_back(u(rng));
    }
  return y;
}

}  // namespace oracle

#endif  // CGTREE_TESTS_ORACLES_HPP
