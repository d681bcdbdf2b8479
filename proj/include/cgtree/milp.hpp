#ifndef CGTREE_MILP_HPP
#define CGTREE_MILP_HPP

#include "cgtree/lp.hpp"

#include <optional>
#include <vector>

namespace cgtree::lp {

struct MilpSpec {
  LinearProgram program;
  std::vector<int> integer_vars;
  std::optional<std::vector<double>> incumbent;  // a feasible integral point, if known
  std::size_t node_limit = 1'000'000;
  double time_limit_seconds = kInf;
  double integrality_tol = 1e-6;
  double prune_tol = 1e-6;
  LpOptions lp;
};

enum class MilpStatus { optimal, infeasible, unbounded, limit };
const char* to_string(MilpStatus s);

struct MilpResult {
  MilpStatus status = MilpStatus::infeasible;
  std::vector<double> x;  // empty when no integral solution is known
  double objective = -kInf;
  double bound = kInf;      // best proven upper bound
  double root_bound = kInf;  // LP relaxation value at the root
  std::size_t nodes = 0;
  bool proven_optimal = false;
  bool has_solution() const { return !x.empty(); }
};

/// Best-bound branch-and-bound over LP relaxations. Branches on the most
/// fractional designated variable (ties to the lowest index); each child
/// warm-starts from its parent's basis.
MilpResult solve_milp(const MilpSpec& spec);

}  // namespace cgtree::lp

#endif  // CGTREE_MILP_HPP
