#pragma once

#include "optbind/adapter.hpp"
#include "optbind/branch_bound.hpp"
#include "optbind/quadratic.hpp"
#include "optbind/simplex.hpp"
#include "optbind/solver_types.hpp"

namespace optbind {

// Picks the method from the model: outer approximation for a quadratic
// objective, branch and bound with integers, plain simplex otherwise.
inline SolveResult solve(const StandardFormModel& m, const SolverConfig& cfg = {}) {
  if (m.has_quadratic()) return solve_miqp(m, cfg);
  if (m.has_integers()) return solve_milp(m, cfg);
  return solve_lp(m, cfg);
}

}  // namespace optbind
