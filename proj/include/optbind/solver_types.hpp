#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "optbind/error.hpp"
#include "optbind/model.hpp"

namespace optbind {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::Unbounded: return "UNBOUNDED";
    default: return "ITER_LIMIT";
  }
}

inline SolveStatus parse_solve_status(const std::string& s) {
  if (s == "OPTIMAL") return SolveStatus::Optimal;
  if (s == "INFEASIBLE") return SolveStatus::Infeasible;
  if (s == "UNBOUNDED") return SolveStatus::Unbounded;
  if (s == "ITER_LIMIT" || s == "TIME_LIMIT" || s == "NODE_LIMIT") return SolveStatus::IterLimit;
  throw data_error("unknown solve status '" + s + "'");
}

struct SolverConfig {
  double feas_tol = 1e-6;
  double int_tol = 1e-5;
  double opt_gap = 1e-9;  // absolute
  std::size_t node_limit = 200'000;
  std::size_t iter_limit = 2'000'000;
  int qp_segments = 16;

  void validate() const {
    if (!(feas_tol > 0 && int_tol > 0 && opt_gap > 0) || node_limit == 0 || iter_limit == 0)
      throw usage_error("solver tolerances and limits must be positive");
    if (qp_segments < 2) throw usage_error("qp_segments must be at least 2");
  }
};

// objective and point are present iff status == Optimal; an ITER_LIMIT
// result may carry the incumbent in `best_point`/`best_objective`.
struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<double> objective;
  std::optional<Point> point;
  std::size_t node_count = 0;
  std::size_t iterations = 0;
  std::optional<double> best_bound;
  std::optional<double> best_objective;
  std::optional<Point> best_point;
  std::string diagnostic;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

}  // namespace optbind
