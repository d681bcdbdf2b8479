#include "cgtree/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cgtree {

const char* to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }
const char* to_string(ClassWeight w) { return w == ClassWeight::none ? "none" : "balanced"; }

void CartParams::validate() const {
  if (max_depth < 1) throw std::invalid_argument("cart: max_depth must be >= 1");
  auto check = [](const std::optional<double>& f, const char* what) {
    if (f && !(*f > 0.0 && *f <= 1.0)) throw std::invalid_argument(std::string("cart: ") + what + " must be in (0,1]");
  };
  check(min_samples_split, "min_samples_split");
  check(min_leaf_fraction, "min_leaf_fraction");
}

int CartTree::grown_depth() const {
  int deepest = 0;
  for (std::size_t n = 0; n < nodes.size(); ++n)
    if (nodes[n].present) deepest = std::max(deepest, Topology::level_of(n));
  return deepest;
}

NodeId CartTree::route(std::span<const double> row) const {
  NodeId n = 0;
  while (!nodes[n].is_leaf) n = nodes[n].split.passes(row) ? 2 * n + 1 : 2 * n + 2;
  return n;
}

double CartTree::accuracy(const Dataset& d, std::span<const std::size_t> rows) const {
  if (rows.empty()) throw std::invalid_argument("cart accuracy: empty row set");
  std::size_t correct = 0;
  for (auto r : rows) correct += predict(d.row(r)) == d.target(r);
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

CartContext make_context(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params) {
  params.validate();
  CartContext ctx;
  const auto n = rows.size();
  const auto counts = class_histogram(d, rows);
  ctx.class_weights.assign(counts.size(), 1.0);
  if (params.class_weight == ClassWeight::balanced) {
    const auto present = static_cast<double>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
    for (std::size_t t = 0; t < counts.size(); ++t)
      ctx.class_weights[t] = counts[t] ? static_cast<double>(n) / (present * static_cast<double>(counts[t])) : 0.0;
  }
  if (params.min_samples_split)
    ctx.min_split_rows = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(*params.min_samples_split * static_cast<double>(n))));
  if (params.min_leaf_fraction)
    ctx.min_leaf_rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(*params.min_leaf_fraction * static_cast<double>(n))));
  return ctx;
}

double impurity(std::span<const double> wc, Criterion criterion) {
  double total = 0;
  for (double v : wc) total += v;
  if (!(total > 0)) throw std::invalid_argument("impurity: all-zero counts");
  double acc = 0;
  if (criterion == Criterion::gini) {
    for (double v : wc) {
      const double p = v / total;
      acc += p * p;
    }
    return std::max(0.0, 1.0 - acc);
  }
  for (double v : wc) {
    if (v <= 0) continue;
    const double p = v / total;
    acc -= p * std::log2(p);
  }
  return std::max(0.0, acc);
}

double impurity(std::span<const std::size_t> counts, Criterion criterion, std::span<const double> weights) {
  std::vector<double> wc(counts.size());
  for (std::size_t t = 0; t < counts.size(); ++t)
    wc[t] = static_cast<double>(counts[t]) * (weights.empty() ? 1.0 : weights[t]);
  return impurity(wc, criterion);
}

double split_score(std::span<const std::size_t> left, std::span<const std::size_t> right, Criterion criterion,
                   std::span<const double> weights) {
  double wl = 0, wr = 0;
  for (std::size_t t = 0; t < left.size(); ++t) {
    wl += static_cast<double>(left[t]) * weights[t];
    wr += static_cast<double>(right[t]) * weights[t];
  }
  double s = 0;
  if (wl > 0) s += wl * impurity(left, criterion, weights);
  if (wr > 0) s += wr * impurity(right, criterion, weights);
  return s / (wl + wr);
}

namespace {

std::vector<double> weighted(std::span<const std::size_t> counts, std::span<const double> weights) {
  std::vector<double> wc(counts.size());
  for (std::size_t t = 0; t < counts.size(); ++t) wc[t] = static_cast<double>(counts[t]) * weights[t];
  return wc;
}

int weighted_majority(std::span<const std::size_t> counts, std::span<const double> weights) {
  const auto wc = weighted(counts, weights);
  return static_cast<int>(std::max_element(wc.begin(), wc.end()) - wc.begin());
}

bool is_pure(std::span<const std::size_t> counts) {
  return std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
}

}  // namespace

std::optional<ScoredSplit> best_split(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params,
                                      const CartContext& ctx) {
  const std::size_t n = rows.size();
  if (n < 2 || n < ctx.min_split_rows || n < 2 * ctx.min_leaf_rows) return std::nullopt;
  const auto total = class_histogram(d, rows);
  if (is_pure(total)) return std::nullopt;

  std::optional<ScoredSplit> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::vector<std::size_t> left(total.size()), right(total.size());
  for (std::size_t f = 0; f < d.n_features(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d.value(a, f) < d.value(b, f); });
    std::fill(left.begin(), left.end(), 0);
    right = total;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto t = static_cast<std::size_t>(d.target(order[i]));
      ++left[t];
      --right[t];
      const double v = d.value(order[i], f);
      if (v == d.value(order[i + 1], f)) continue;
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < ctx.min_leaf_rows || nr < ctx.min_leaf_rows) continue;
      const double s = split_score(left, right, params.criterion, ctx.class_weights);
      if (!best || s < best->score) best = ScoredSplit{{f, v}, s};
    }
  }
  return best;
}

std::optional<ScoredSplit> best_split(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params) {
  return best_split(d, rows, params, make_context(d, rows, params));
}

namespace {

void grow(const Dataset& d, std::vector<std::size_t>& rows, NodeId node, int level, const CartParams& params,
          const CartContext& ctx, CartTree& tree) {
  auto& nd = tree.nodes[node];
  nd.present = true;
  nd.counts = class_histogram(d, rows);
  nd.majority = weighted_majority(nd.counts, ctx.class_weights);
  nd.is_leaf = true;
  if (level >= params.max_depth) return;
  auto s = best_split(d, rows, params, ctx);
  if (!s) return;
  nd.is_leaf = false;
  nd.split = s->split;
  std::vector<std::size_t> left, right;
  for (auto r : rows) (d.value(r, s->split.feature) <= s->split.threshold ? left : right).push_back(r);
  rows.clear();
  rows.shrink_to_fit();
  grow(d, left, 2 * node + 1, level + 1, params, ctx, tree);
  grow(d, right, 2 * node + 2, level + 1, params, ctx, tree);
}

}  // namespace

CartTree build_cart(const Dataset& d, std::span<const std::size_t> rows, const CartParams& params) {
  if (rows.empty()) throw std::invalid_argument("build_cart: no rows");
  const auto ctx = make_context(d, rows, params);
  CartTree tree;
  tree.max_depth = params.max_depth;
  tree.nodes.resize((std::size_t{1} << (params.max_depth + 1)) - 1);
  std::vector<std::size_t> root(rows.begin(), rows.end());
  grow(d, root, 0, 0, params, ctx, tree);
  return tree;
}

std::vector<CartParams> cart_star_grid(int max_depth) {
  std::vector<CartParams> grid;
  for (auto crit : {Criterion::gini, Criterion::entropy})
    for (double mss : {0.02, 0.05, 0.1, 0.2})
      for (auto cw : {ClassWeight::none, ClassWeight::balanced})
        for (double mlf : {0.01, 0.05, 0.1, 0.2, 1.0}) {
          CartParams p;
          p.max_depth = max_depth;
          p.criterion = crit;
          p.min_samples_split = mss;
          p.class_weight = cw;
          p.min_leaf_fraction = mlf;
          grid.push_back(p);
        }
  return grid;
}

CartStarResult tune_cart_star(const Dataset& d, std::span<const std::size_t> rows, int max_depth) {
  constexpr std::size_t kFolds = 10;
  const std::size_t n = rows.size();
  if (n < 2 * kFolds) throw std::invalid_argument("tune_cart_star: need at least 20 rows for 10-fold cross validation");

  // contiguous folds; the first n % 10 folds take one extra row
  std::vector<std::size_t> fold_start{0};
  for (std::size_t k = 0; k < kFolds; ++k) fold_start.push_back(fold_start.back() + n / kFolds + (k < n % kFolds));

  CartStarResult out;
  double best = -1.0;
  for (const auto& params : cart_star_grid(max_depth)) {
    double acc = 0;
    for (std::size_t k = 0; k < kFolds; ++k) {
      std::vector<std::size_t> train, held;
      for (std::size_t i = 0; i < n; ++i) (i >= fold_start[k] && i < fold_start[k + 1] ? held : train).push_back(rows[i]);
      acc += build_cart(d, train, params).accuracy(d, held);
    }
    acc /= static_cast<double>(kFolds);
    out.grid.push_back({params, acc});
    if (acc > best) {
      best = acc;
      out.params = params;
    }
  }
  out.tree = build_cart(d, rows, out.params);
  return out;
}

}  // namespace cgtree
