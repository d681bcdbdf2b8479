#ifndef CGTREE_LP_HPP
#define CGTREE_LP_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cgtree::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  int index;  // row for a column entry, variable for a row entry
  double value;
};

enum class Sense { eq, le, ge };

/// maximize c.x  s.t.  A x = b,  lower <= x <= upper.
/// Stored column-wise; inequality rows are turned into equalities by an
/// explicit slack variable at construction time.
class LinearProgram {
 public:
  int n_vars() const { return static_cast<int>(cost_.size()); }
  int n_rows() const { return static_cast<int>(rhs_.size()); }

  int add_variable(double cost, double lower = 0.0, double upper = kInf, std::string name = {});
  int add_column(double cost, std::span<const Entry> rows, double lower = 0.0, double upper = kInf,
                 std::string name = {});
  int add_row(double rhs, std::string name = {});
  /// Adds sum(coef * x_var) (sense) rhs. Returns the row index.
  int add_constraint(std::span<const Entry> vars, Sense sense, double rhs, std::string name = {});
  void add_coefficient(int row, int var, double value);

  void set_bounds(int var, double lower, double upper);
  void set_cost(int var, double c) { cost_[static_cast<std::size_t>(var)] = c; }

  double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }
  double lower(int j) const { return lower_[static_cast<std::size_t>(j)]; }
  double upper(int j) const { return upper_[static_cast<std::size_t>(j)]; }
  double rhs(int i) const { return rhs_[static_cast<std::size_t>(i)]; }
  const std::vector<Entry>& column(int j) const { return cols_[static_cast<std::size_t>(j)]; }
  const std::string& var_name(int j) const { return var_names_[static_cast<std::size_t>(j)]; }
  const std::string& row_name(int i) const { return row_names_[static_cast<std::size_t>(i)]; }

  double objective(std::span<const double> x) const;
  /// max_i |(A x - b)_i|
  double primal_residual(std::span<const double> x) const;

 private:
  std::vector<double> cost_, lower_, upper_, rhs_;
  std::vector<std::vector<Entry>> cols_;
  std::vector<std::string> var_names_, row_names_;
};

/// Basis of a solved program. basic[i] >= 0 is a structural variable,
/// basic[i] = -(r+1) is the artificial of row r. Nonbasic structurals sit at
/// their upper bound iff at_upper[j].
struct Basis {
  std::vector<int> basic;
  std::vector<std::uint8_t> at_upper;
  bool empty() const { return basic.empty(); }
};

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure, iteration_limit, time_limit };
const char* to_string(LpStatus s);

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  int bland_after_degenerate = 500;
  std::size_t max_iterations = 1'000'000;
  double time_limit_seconds = kInf;  // wall clock
};

struct LpSolution {
  LpStatus status = LpStatus::numerical_failure;
  std::vector<double> x;
  std::vector<double> duals;  // one per row
  double objective = 0.0;
  Basis basis;
  std::size_t iterations = 0;
  bool warm_started = false;
};

/// Two-phase bounded-variable primal simplex with Devex pricing and a Harris
/// ratio test; degenerate runs trigger bound perturbation, then Bland's rule.
/// A warm basis that is still primal feasible skips phase 1, a dual feasible
/// one is repaired by the dual simplex, anything else restarts cold. Returns
/// time_limit once opt.time_limit_seconds of wall clock have passed.
LpSolution solve_lp(const LinearProgram& p, const Basis* warm = nullptr, const LpOptions& opt = {});

/// Appends a column and extends `basis` so the next solve starts warm (the
/// new variable enters nonbasic at its lower bound).
int add_column(LinearProgram& p, Basis& basis, double cost, std::span<const Entry> rows, double lower = 0.0,
               double upper = kInf);

/// Human-readable LP-format listing (objective, constraints, bounds).
void write_lp_text(std::ostream& os, const LinearProgram& p);

}  // namespace cgtree::lp

#endif  // CGTREE_LP_HPP
