#include "cgtree/lp.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cgtree::lp {

int LinearProgram::add_variable(double cost, double lower, double upper, std::string name) {
  return add_column(cost, {}, lower, upper, std::move(name));
}

int LinearProgram::add_column(double cost, std::span<const Entry> rows, double lower, double upper,
                              std::string name) {
  if (!std::isfinite(lower)) throw std::invalid_argument("lp: lower bounds must be finite");
  if (upper < lower) throw std::invalid_argument("lp: upper bound below lower bound");
  const int j = n_vars();
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  auto& col = cols_.emplace_back();
  for (const auto& e : rows) {
    if (e.index < 0 || e.index >= n_rows()) throw std::out_of_range("lp: column entry references unknown row");
    if (e.value != 0.0) col.push_back(e);
  }
  var_names_.push_back(name.empty() ? "x" + std::to_string(j) : std::move(name));
  return j;
}

int LinearProgram::add_row(double rhs, std::string name) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("lp: right-hand side must be finite");
  const int i = n_rows();
  rhs_.push_back(rhs);
  row_names_.push_back(name.empty() ? "c" + std::to_string(i) : std::move(name));
  return i;
}

int LinearProgram::add_constraint(std::span<const Entry> vars, Sense sense, double rhs, std::string name) {
  const int i = add_row(rhs, std::move(name));
  for (const auto& e : vars) add_coefficient(i, e.index, e.value);
  if (sense != Sense::eq) {
    const Entry slack{i, sense == Sense::le ? 1.0 : -1.0};
    add_column(0.0, std::span(&slack, 1), 0.0, kInf, "s" + std::to_string(i));
  }
  return i;
}

void LinearProgram::add_coefficient(int row, int var, double value) {
  if (row < 0 || row >= n_rows() || var < 0 || var >= n_vars()) throw std::out_of_range("lp: coefficient index");
  if (value == 0.0) return;
  auto& col = cols_[static_cast<std::size_t>(var)];
  for (auto& e : col)
    if (e.index == row) {
      e.value += value;
      return;
    }
  col.push_back({row, value});
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  if (!std::isfinite(lower)) throw std::invalid_argument("lp: lower bounds must be finite");
  if (upper < lower) throw std::invalid_argument("lp: upper bound below lower bound");
  lower_[static_cast<std::size_t>(var)] = lower;
  upper_[static_cast<std::size_t>(var)] = upper;
}

double LinearProgram::objective(std::span<const double> x) const {
  double z = 0;
  for (int j = 0; j < n_vars(); ++j) z += cost(j) * x[static_cast<std::size_t>(j)];
  return z;
}

double LinearProgram::primal_residual(std::span<const double> x) const {
  std::vector<double> ax(rhs_.size(), 0.0);
  for (int j = 0; j < n_vars(); ++j)
    for (const auto& e : column(j)) ax[static_cast<std::size_t>(e.index)] += e.value * x[static_cast<std::size_t>(j)];
  double worst = 0;
  for (std::size_t i = 0; i < ax.size(); ++i) worst = std::max(worst, std::abs(ax[i] - rhs_[i]));
  return worst;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::numerical_failure: return "numerical_failure";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::time_limit: return "time_limit";
  }
  return "?";
}

int add_column(LinearProgram& p, Basis& basis, double cost, std::span<const Entry> rows, double lower,
               double upper) {
  const int j = p.add_column(cost, rows, lower, upper);
  if (!basis.empty()) basis.at_upper.resize(static_cast<std::size_t>(p.n_vars()), 0);
  return j;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct Eta {
  int row;
  double pivot;
  std::vector<std::pair<int, double>> off;  // entries i != row
};

enum class PhaseResult { optimal, unbounded, infeasible, failure, limit };

// Bounded revised simplex. Variables n_..n_+m_-1 are one artificial per
// row. The basis inverse is a sparse LU of the last refactored basis plus a
// product-form eta file.
class Simplex {
 public:
  Simplex(const LinearProgram& p, const LpOptions& opt)
      : p_(p), opt_(opt), m_(p.n_rows()), n_(p.n_vars()), total_(n_ + m_), rng_(0x5eed) {
    lo_.resize(idx(total_));
    up_.resize(idx(total_));
    for (int j = 0; j < n_; ++j) {
      lo_[idx(j)] = p.lower(j);
      up_[idx(j)] = p.upper(j);
    }
    sign_.assign(idx(m_), 1.0);
    rows_.resize(idx(m_));
    for (int j = 0; j < n_; ++j)
      for (const auto& e : p.column(j)) rows_[idx(e.index)].emplace_back(j, e.value);
    row_.assign(idx(total_), 0.0);
    in_row_.assign(idx(total_), 0);
  }

  LpSolution run(const Basis* warm) {
    LpSolution sol;
    bool ready = false;
    if (warm && !warm->empty() && static_cast<int>(warm->basic.size()) == m_) {
      switch (try_warm(*warm)) {
        case Warm::primal_feasible:
          ready = true;
          break;
        case Warm::dual_feasible: {
          const auto r = dual_iterate();
          if (r == PhaseResult::optimal) ready = true;
          if (r == PhaseResult::infeasible) return fail(sol, LpStatus::infeasible);
          break;
        }
        case Warm::unusable:
          break;
      }
    }
    sol.warm_started = ready;
    if (!ready) {
      if (!cold_start()) return fail(sol, LpStatus::numerical_failure);
      // phase 1: maximize -sum(artificials)
      cost_.assign(idx(total_), 0.0);
      for (int i = 0; i < m_; ++i) cost_[idx(n_ + i)] = -1.0;
      d_valid_ = false;
      const auto r = primal_iterate(true);
      if (r == PhaseResult::failure) return fail(sol, LpStatus::numerical_failure);
      if (r == PhaseResult::limit) return fail(sol, limit_status());
      if (perturbed_ && !restore_bounds()) return fail(sol, LpStatus::numerical_failure);
      double infeas = 0;
      for (int i = 0; i < m_; ++i) infeas += std::max(x_[idx(n_ + i)], 0.0);
      if (infeas > opt_.feasibility_tol * static_cast<double>(1 + m_)) return fail(sol, LpStatus::infeasible);
      fix_artificials();
    }
    set_phase2_costs();
    for (int attempt = 0;; ++attempt) {
      const auto r = primal_iterate(attempt < 2);
      if (r == PhaseResult::failure) return fail(sol, LpStatus::numerical_failure);
      if (r == PhaseResult::limit) return fail(sol, limit_status());
      if (r == PhaseResult::unbounded) return fail(sol, LpStatus::unbounded);
      if (perturbed_) {
        if (!restore_bounds()) return fail(sol, LpStatus::numerical_failure);
      } else {
        if (!refactor()) return fail(sol, LpStatus::numerical_failure);
        compute_basic_values();
      }
      if (primal_feasible()) break;
      if (attempt >= 3) return fail(sol, LpStatus::numerical_failure);
      // the basis is still dual feasible: repair the primal side
      const auto d = dual_iterate();
      if (d == PhaseResult::failure) return fail(sol, LpStatus::numerical_failure);
      if (d == PhaseResult::limit) return fail(sol, limit_status());
      if (d == PhaseResult::infeasible) return fail(sol, LpStatus::infeasible);
    }

    sol.status = LpStatus::optimal;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) {
      // snap tiny bound violations
      auto& v = sol.x[idx(j)];
      if (v < lo_[idx(j)]) v = lo_[idx(j)];
      if (v > up_[idx(j)]) v = up_[idx(j)];
    }
    sol.duals = duals();
    sol.objective = p_.objective(sol.x);
    sol.basis = export_basis();
    sol.iterations = iterations_;
    return sol;
  }

 private:
  enum class Warm { primal_feasible, dual_feasible, unusable };

  static std::size_t idx(int j) { return static_cast<std::size_t>(j); }

  LpSolution& fail(LpSolution& sol, LpStatus s) {
    sol.status = s;
    sol.iterations = iterations_;
    return sol;
  }

  template <class F>
  void for_column(int j, F&& f) const {
    if (j < n_) {
      for (const auto& e : p_.column(j)) f(e.index, e.value);
    } else {
      f(j - n_, sign_[idx(j - n_)]);
    }
  }

  double nonbasic_value(int j) const { return at_up_[idx(j)] ? up_[idx(j)] : lo_[idx(j)]; }
  bool fixed(int j) const { return lo_[idx(j)] == up_[idx(j)]; }

  void set_phase2_costs() {
    d_valid_ = false;
    cost_.assign(idx(total_), 0.0);
    for (int j = 0; j < n_; ++j) cost_[idx(j)] = p_.cost(j);
  }

  bool cold_start() {
    pos_.assign(idx(total_), -1);
    at_up_.assign(idx(total_), 0);
    x_.assign(idx(total_), 0.0);
    std::vector<double> resid(idx(m_));
    for (int i = 0; i < m_; ++i) resid[idx(i)] = p_.rhs(i);
    for (int j = 0; j < n_; ++j) {
      x_[idx(j)] = lo_[idx(j)];
      for (const auto& e : p_.column(j)) resid[idx(e.index)] -= e.value * x_[idx(j)];
    }
    basic_.resize(idx(m_));
    for (int i = 0; i < m_; ++i) {
      sign_[idx(i)] = resid[idx(i)] >= 0 ? 1.0 : -1.0;
      lo_[idx(n_ + i)] = 0.0;
      up_[idx(n_ + i)] = kInf;
      basic_[idx(i)] = n_ + i;
      pos_[idx(n_ + i)] = i;
      x_[idx(n_ + i)] = std::abs(resid[idx(i)]);
    }
    return refactor();
  }

  Warm try_warm(const Basis& warm) {
    pos_.assign(idx(total_), -1);
    at_up_.assign(idx(total_), 0);
    x_.assign(idx(total_), 0.0);
    basic_.resize(idx(m_));
    for (int i = 0; i < m_; ++i) {
      sign_[idx(i)] = 1.0;
      lo_[idx(n_ + i)] = 0.0;
      up_[idx(n_ + i)] = 0.0;
    }
    for (int i = 0; i < m_; ++i) {
      const int b = warm.basic[idx(i)];
      const int var = b >= 0 ? b : n_ + (-b - 1);
      if (var < 0 || var >= total_ || (b >= 0 && b >= n_) || pos_[idx(var)] != -1) return Warm::unusable;
      basic_[idx(i)] = var;
      pos_[idx(var)] = i;
    }
    for (int j = 0; j < n_; ++j) {
      if (pos_[idx(j)] >= 0) continue;
      const bool upper = idx(j) < warm.at_upper.size() && warm.at_upper[idx(j)] && std::isfinite(up_[idx(j)]);
      at_up_[idx(j)] = upper ? 1 : 0;
      x_[idx(j)] = nonbasic_value(j);
    }
    if (!refactor()) return Warm::unusable;
    compute_basic_values();
    if (primal_feasible()) return Warm::primal_feasible;
    set_phase2_costs();
    const auto y = prices();
    for (int j = 0; j < total_; ++j) {
      if (pos_[idx(j)] >= 0 || fixed(j)) continue;
      const double d = reduced_cost(j, y);
      if (at_up_[idx(j)] ? d < -opt_.optimality_tol : d > opt_.optimality_tol) return Warm::unusable;
    }
    return Warm::dual_feasible;
  }

  bool primal_feasible() const {
    for (int i = 0; i < m_; ++i) {
      const int b = basic_[idx(i)];
      const double tol = opt_.feasibility_tol * (1.0 + std::abs(x_[idx(b)]));
      if (x_[idx(b)] < lo_[idx(b)] - tol || x_[idx(b)] > up_[idx(b)] + tol) return false;
    }
    return true;
  }

  void fix_artificials() {
    for (int i = 0; i < m_; ++i) {
      const int a = n_ + i;
      up_[idx(a)] = 0.0;
      if (pos_[idx(a)] < 0) {
        at_up_[idx(a)] = 0;
        x_[idx(a)] = 0.0;
      }
    }
  }

  // Relaxes the bounds of variable j by a small random amount; used against
  // stalling on degenerate vertices.
  void perturb(int j) {
    if (!perturbed_) {
      saved_lo_ = lo_;
      saved_up_ = up_;
      perturbed_ = true;
    }
    std::uniform_real_distribution<double> u(0.5, 1.0);
    if (lo_[idx(j)] == saved_lo_[idx(j)]) lo_[idx(j)] -= kPerturbation * u(rng_) * (1.0 + std::abs(lo_[idx(j)]));
    if (std::isfinite(up_[idx(j)]) && up_[idx(j)] == saved_up_[idx(j)])
      up_[idx(j)] += kPerturbation * u(rng_) * (1.0 + std::abs(up_[idx(j)]));
  }

  // Moves the active bound of a leaving variable out to its current value
  // when it ended slightly outside, so that A x = b is kept exactly.
  void shift_bound(int j) {
    const double v = x_[idx(j)];
    const bool up = at_up_[idx(j)] != 0;
    if (up ? v <= up_[idx(j)] : v >= lo_[idx(j)]) return;
    if (!perturbed_) {
      saved_lo_ = lo_;
      saved_up_ = up_;
      perturbed_ = true;
    }
    (up ? up_ : lo_)[idx(j)] = v;
  }

  bool restore_bounds() {
    for (int j = 0; j < total_; ++j) {
      lo_[idx(j)] = saved_lo_[idx(j)];
      up_[idx(j)] = saved_up_[idx(j)];
      if (pos_[idx(j)] < 0) x_[idx(j)] = nonbasic_value(j);
    }
    perturbed_ = false;
    if (!refactor()) return false;
    compute_basic_values();
    return true;
  }

  bool out_of_budget() {
    if (iterations_ >= opt_.max_iterations) return true;
    if (std::isfinite(opt_.time_limit_seconds) && iterations_ % 50 == 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count() > opt_.time_limit_seconds)
      timed_out_ = true;
    return timed_out_;
  }

  LpStatus limit_status() const { return timed_out_ ? LpStatus::time_limit : LpStatus::iteration_limit; }

  bool refactor() {
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < m_; ++i)
      for_column(basic_[idx(i)], [&](int r, double v) { trip.emplace_back(r, i, v); });
    SpMat B(m_, m_);
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    lu_.analyzePattern(B);
    lu_.factorize(B);
    etas_.clear();
    d_valid_ = false;
    return lu_.info() == Eigen::Success;
  }

  void ftran(Eigen::VectorXd& v) const {
    v = lu_.solve(v).eval();
    for (const auto& e : etas_) {
      const double vr = v[e.row] / e.pivot;
      v[e.row] = vr;
      if (vr != 0.0)
        for (const auto& [i, d] : e.off) v[i] -= d * vr;
    }
  }

  Eigen::VectorXd btran(Eigen::VectorXd z) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = z[it->row];
      for (const auto& [i, d] : it->off) s -= z[i] * d;
      z[it->row] = s / it->pivot;
    }
    return lu_.transpose().solve(z);
  }

  void compute_basic_values() {
    Eigen::VectorXd r(m_);
    for (int i = 0; i < m_; ++i) r[i] = p_.rhs(i);
    for (int j = 0; j < total_; ++j) {
      if (pos_[idx(j)] >= 0) continue;
      const double v = x_[idx(j)];
      if (v != 0.0) for_column(j, [&](int row, double a) { r[row] -= a * v; });
    }
    ftran(r);
    for (int i = 0; i < m_; ++i) x_[idx(basic_[idx(i)])] = r[i];
  }

  Eigen::VectorXd prices() const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost_[idx(basic_[idx(i)])];
    return btran(std::move(cb));
  }

  std::vector<double> duals() const {
    auto y = prices();
    return {y.data(), y.data() + y.size()};
  }

  double reduced_cost(int j, const Eigen::VectorXd& y) const {
    double d = cost_[idx(j)];
    for_column(j, [&](int r, double a) { d -= y[r] * a; });
    return d;
  }

  // Reduced costs of all variables for the current basis.
  void compute_reduced_costs() {
    const auto y = prices();
    d_.assign(idx(total_), 0.0);
    for (int j = 0; j < total_; ++j)
      if (pos_[idx(j)] < 0) d_[idx(j)] = reduced_cost(j, y);
    d_valid_ = true;
  }

  // Row `r` of B^-1 A over the nonbasic, non-fixed variables, left in row_
  // with its support in touched_.
  void pivot_row(int r) {
    for (int j : touched_) {
      row_[idx(j)] = 0.0;
      in_row_[idx(j)] = 0;
    }
    touched_.clear();
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(m_);
    unit[r] = 1.0;
    const auto rho = btran(std::move(unit));
    auto add = [&](int j, double v) {
      if (pos_[idx(j)] >= 0 || fixed(j)) return;
      if (!in_row_[idx(j)]) {
        in_row_[idx(j)] = 1;
        touched_.push_back(j);
      }
      row_[idx(j)] += v;
    };
    for (int i = 0; i < m_; ++i) {
      const double ri = rho[i];
      if (ri == 0.0) continue;
      for (const auto& [j, v] : rows_[idx(i)]) add(j, ri * v);
      add(n_ + i, ri * sign_[idx(i)]);
    }
  }

  // Updates d_ for q entering in place of `out`, using the pivot row in row_.
  void update_reduced_costs(int q, int out, double pivot_value) {
    if (!d_valid_) return;
    const double mult = d_[idx(q)] / pivot_value;
    for (int j : touched_) d_[idx(j)] -= mult * row_[idx(j)];
    d_[idx(q)] = 0.0;
    d_[idx(out)] = -mult;
  }

  // Replaces the basic variable of row `leave` by q, whose ftran'd column is
  // alpha. Returns false when the refactorization fails.
  bool pivot(int leave, int q, const Eigen::VectorXd& alpha) {
    const int out = basic_[idx(leave)];
    pos_[idx(out)] = -1;
    basic_[idx(leave)] = q;
    pos_[idx(q)] = leave;
    at_up_[idx(q)] = 0;
    Eta e{leave, alpha[leave], {}};
    for (int i = 0; i < m_; ++i)
      if (i != leave && alpha[i] != 0.0) e.off.emplace_back(i, alpha[i]);
    etas_.push_back(std::move(e));
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      if (!refactor()) return false;
      compute_basic_values();
    }
    return true;
  }

  PhaseResult primal_iterate(bool allow_perturbation) {
    int degenerate_run = 0;
    bool bland = false;
    Eigen::VectorXd alpha(m_);
    // Devex reference weights
    std::vector<double> weight(idx(total_), 1.0);
    while (true) {
      if (out_of_budget()) return PhaseResult::limit;
      const bool fresh = !d_valid_;
      if (fresh) compute_reduced_costs();

      int q = -1;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (pos_[idx(j)] >= 0 || fixed(j)) continue;
        const double d = d_[idx(j)];
        double score = 0.0;
        if (!at_up_[idx(j)] && d > opt_.optimality_tol) score = d;
        if (at_up_[idx(j)] && d < -opt_.optimality_tol) score = -d;
        if (score <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        score = score * score / weight[idx(j)];
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q < 0) {
        if (fresh) return PhaseResult::optimal;
        d_valid_ = false;
        continue;
      }

      alpha.setZero();
      for_column(q, [&](int r, double a) { alpha[r] = a; });
      ftran(alpha);
      const double dir = at_up_[idx(q)] ? -1.0 : 1.0;

      const double span = up_[idx(q)] - lo_[idx(q)];
      auto ratio_of = [&](int i, double slack_tol, bool& to_upper) {
        const int b = basic_[idx(i)];
        const double rate = -dir * alpha[i];
        if (rate < 0) {
          to_upper = false;
          return (std::max(x_[idx(b)] - lo_[idx(b)], 0.0) + slack_tol) / -rate;
        }
        to_upper = true;
        if (!std::isfinite(up_[idx(b)])) return kInf;
        return (std::max(up_[idx(b)] - x_[idx(b)], 0.0) + slack_tol) / rate;
      };
      double theta = span;
      int leave = -1;
      bool leave_to_upper = false;
      if (bland) {
        // textbook minimum ratio, ties to the lowest variable index
        for (int i = 0; i < m_; ++i) {
          if (std::abs(alpha[i]) <= kBlandPivot) continue;
          bool to_upper;
          const double ratio = ratio_of(i, 0.0, to_upper);
          if (!std::isfinite(ratio)) continue;
          bool take = ratio < theta - 1e-12;
          if (!take && leave >= 0 && ratio <= theta + 1e-12) take = basic_[idx(i)] < basic_[idx(leave)];
          if (take) {
            theta = std::min(theta, ratio);
            leave = i;
            leave_to_upper = to_upper;
          }
        }
      } else {
        // Harris: bound the step with relaxed bounds, then take the largest
        // pivot among the rows that block within that bound
        double relaxed = kInf;
        for (int i = 0; i < m_; ++i) {
          if (std::abs(alpha[i]) <= opt_.pivot_tol) continue;
          bool to_upper;
          relaxed = std::min(relaxed, ratio_of(i, opt_.feasibility_tol, to_upper));
        }
        if (span > relaxed) {
          double best_pivot = 0.0;
          for (int i = 0; i < m_; ++i) {
            const double a = std::abs(alpha[i]);
            if (a <= opt_.pivot_tol) continue;
            bool to_upper;
            const double ratio = ratio_of(i, 0.0, to_upper);
            if (ratio > relaxed) continue;
            if (a > best_pivot) {
              best_pivot = a;
              leave = i;
              leave_to_upper = to_upper;
              theta = ratio;
            }
          }
        }
      }
      if (!std::isfinite(theta)) return PhaseResult::unbounded;

      if (theta != 0.0)
        for (int i = 0; i < m_; ++i)
          if (alpha[i] != 0.0) x_[idx(basic_[idx(i)])] -= dir * alpha[i] * theta;
      x_[idx(q)] += dir * theta;
      ++iterations_;
      if (theta <= 1e-12) {
        ++degenerate_run;
        if (allow_perturbation && degenerate_run >= kPerturbAfter && !perturbed_) {
          for (int i = 0; i < m_; ++i) perturb(basic_[idx(i)]);
          degenerate_run = 0;
        }
        if (degenerate_run > opt_.bland_after_degenerate) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      if (leave < 0) {
        at_up_[idx(q)] ^= 1;
        x_[idx(q)] = nonbasic_value(q);
        continue;
      }
      const int out = basic_[idx(leave)];
      const double ar = alpha[leave];
      pivot_row(leave);
      if (!bland) {
        const double wq = weight[idx(q)];
        bool reset = false;
        for (int j : touched_) {
          if (j == q) continue;
          const double ratio = row_[idx(j)] / ar;
          weight[idx(j)] = std::max(weight[idx(j)], ratio * ratio * wq);
          reset = reset || weight[idx(j)] > 1e6;
        }
        weight[idx(out)] = std::max(wq / (ar * ar), 1.0);
        if (reset) std::fill(weight.begin(), weight.end(), 1.0);
      }
      update_reduced_costs(q, out, ar);
      at_up_[idx(out)] = leave_to_upper ? 1 : 0;
      shift_bound(out);
      x_[idx(out)] = nonbasic_value(out);
      if (perturbed_) perturb(q);
      if (!pivot(leave, q, alpha)) return PhaseResult::failure;
    }
  }

  // Dual simplex for the current costs from a dual feasible basis.
  PhaseResult dual_iterate() {
    Eigen::VectorXd alpha(m_);
    while (true) {
      if (out_of_budget()) return PhaseResult::limit;
      int r = -1;
      double worst = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int b = basic_[idx(i)];
        const double tol = opt_.feasibility_tol * (1.0 + std::abs(x_[idx(b)]));
        double v = 0.0;
        if (x_[idx(b)] < lo_[idx(b)] - tol) v = lo_[idx(b)] - x_[idx(b)];
        if (x_[idx(b)] > up_[idx(b)] + tol) v = x_[idx(b)] - up_[idx(b)];
        if (v > worst) {
          worst = v;
          r = i;
        }
      }
      if (r < 0) return PhaseResult::optimal;
      const int out = basic_[idx(r)];
      const bool below = x_[idx(out)] < lo_[idx(out)];

      if (!d_valid_) compute_reduced_costs();
      pivot_row(r);

      // entering candidates: moving x_j in its feasible direction must push
      // x_out toward the violated bound
      auto eligible = [&](int j, double a) {
        const bool up_move = !at_up_[idx(j)];
        return below ? (up_move ? a < 0 : a > 0) : (up_move ? a > 0 : a < 0);
      };
      double relaxed = kInf;
      for (int j : touched_) {
        const double a = row_[idx(j)];
        if (std::abs(a) <= opt_.pivot_tol || !eligible(j, a)) continue;
        const double d = d_[idx(j)];
        const double slack = std::max(at_up_[idx(j)] ? d : -d, 0.0);
        relaxed = std::min(relaxed, (slack + opt_.optimality_tol) / std::abs(a));
      }
      if (!std::isfinite(relaxed)) return PhaseResult::infeasible;
      int q = -1;
      double best_pivot = 0.0;
      for (int j : touched_) {
        const double a = row_[idx(j)];
        if (std::abs(a) <= opt_.pivot_tol || !eligible(j, a)) continue;
        const double d = d_[idx(j)];
        const double slack = std::max(at_up_[idx(j)] ? d : -d, 0.0);
        if (slack / std::abs(a) > relaxed) continue;
        if (std::abs(a) > best_pivot) {
          best_pivot = std::abs(a);
          q = j;
        }
      }
      if (q < 0) return PhaseResult::infeasible;

      alpha.setZero();
      for_column(q, [&](int i, double a) { alpha[i] = a; });
      ftran(alpha);
      if (std::abs(alpha[r]) <= opt_.pivot_tol) return PhaseResult::failure;
      const double target = below ? lo_[idx(out)] : up_[idx(out)];
      const double step = (x_[idx(out)] - target) / alpha[r];
      for (int i = 0; i < m_; ++i)
        if (alpha[i] != 0.0) x_[idx(basic_[idx(i)])] -= alpha[i] * step;
      x_[idx(q)] += step;
      ++iterations_;
      at_up_[idx(out)] = below ? 0 : 1;
      x_[idx(out)] = target;
      update_reduced_costs(q, out, alpha[r]);
      if (!pivot(r, q, alpha)) return PhaseResult::failure;
    }
  }

  Basis export_basis() const {
    Basis b;
    b.basic.resize(idx(m_));
    for (int i = 0; i < m_; ++i) {
      const int v = basic_[idx(i)];
      b.basic[idx(i)] = v < n_ ? v : -(v - n_ + 1);
    }
    b.at_upper.assign(at_up_.begin(), at_up_.begin() + n_);
    return b;
  }

  static constexpr double kPerturbation = 1e-6;
  static constexpr double kBlandPivot = 1e-7;
  static constexpr int kPerturbAfter = 20;

  const LinearProgram& p_;
  LpOptions opt_;
  int m_, n_, total_;
  std::vector<double> lo_, up_, cost_, x_, sign_;
  std::vector<double> saved_lo_, saved_up_;
  bool perturbed_ = false;
  std::mt19937_64 rng_;
  std::vector<int> basic_, pos_;
  std::vector<std::uint8_t> at_up_;
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  std::size_t iterations_ = 0;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  bool timed_out_ = false;
  std::vector<std::vector<std::pair<int, double>>> rows_;  // structural entries by row
  std::vector<double> d_, row_;
  std::vector<std::uint8_t> in_row_;
  std::vector<int> touched_;
  bool d_valid_ = false;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& p, const Basis* warm, const LpOptions& opt) {
  if (p.n_rows() == 0) {
    // no constraints: every variable sits at its best bound
    LpSolution sol;
    sol.x.resize(static_cast<std::size_t>(p.n_vars()));
    for (int j = 0; j < p.n_vars(); ++j) {
      if (p.cost(j) > 0 && !std::isfinite(p.upper(j))) {
        sol.status = LpStatus::unbounded;
        return sol;
      }
      sol.x[static_cast<std::size_t>(j)] = p.cost(j) > 0 ? p.upper(j) : p.lower(j);
    }
    sol.status = LpStatus::optimal;
    sol.objective = p.objective(sol.x);
    for (int j = 0; j < p.n_vars(); ++j) sol.basis.at_upper.push_back(p.cost(j) > 0);
    return sol;
  }
  Simplex s(p, opt);
  return s.run(warm);
}

void write_lp_text(std::ostream& os, const LinearProgram& p) {
  auto term = [&](double v, const std::string& name, bool first) {
    if (v < 0)
      os << (first ? "-" : " - ");
    else if (!first)
      os << " + ";
    if (std::abs(v) != 1.0) os << std::setprecision(17) << std::abs(v) << " ";
    os << name;
  };
  os << "Maximize\n obj:";
  bool first = true;
  for (int j = 0; j < p.n_vars(); ++j) {
    if (p.cost(j) == 0.0) continue;
    os << ' ';
    term(p.cost(j), p.var_name(j), first);
    first = false;
  }
  if (first) os << " 0";
  os << "\nSubject To\n";
  std::vector<std::vector<Entry>> rows(static_cast<std::size_t>(p.n_rows()));
  for (int j = 0; j < p.n_vars(); ++j)
    for (const auto& e : p.column(j)) rows[static_cast<std::size_t>(e.index)].push_back({j, e.value});
  for (int i = 0; i < p.n_rows(); ++i) {
    os << ' ' << p.row_name(i) << ":";
    bool f = true;
    for (const auto& e : rows[static_cast<std::size_t>(i)]) {
      os << ' ';
      term(e.value, p.var_name(e.index), f);
      f = false;
    }
    if (f) os << " 0";
    os << " = " << std::setprecision(17) << p.rhs(i) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < p.n_vars(); ++j) {
    os << ' ' << std::setprecision(17) << p.lower(j) << " <= " << p.var_name(j);
    if (std::isfinite(p.upper(j))) os << " <= " << p.upper(j);
    os << "\n";
  }
  os << "End\n";
}

}  // namespace cgtree::lp
