#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <queue>
#include <vector>

#include "optbind/model.hpp"
#include "optbind/simplex.hpp"
#include "optbind/solver_types.hpp"

namespace optbind {

namespace detail {

inline lp::LpOptions lp_options(const SolverConfig& cfg) {
  lp::LpOptions o;
  o.iter_limit = cfg.iter_limit;
  return o;
}

inline Point make_point(std::vector<double> x) { return Point{std::move(x)}; }

}  // namespace detail

// Linear relaxation only; q_diag must be absent and every variable continuous.
inline SolveResult solve_lp(const StandardFormModel& m, const SolverConfig& cfg = {}) {
  cfg.validate();
  require_valid(m);
  if (m.has_quadratic()) throw data_error("solve_lp: quadratic objective requires linearization first");
  if (m.has_integers()) throw data_error("solve_lp: model has integer variables; use solve_milp");
  const auto lp = lp::make_lp(m);
  const auto out = lp::solve(lp, m.lb, m.ub, detail::lp_options(cfg));
  SolveResult r;
  r.status = out.status;
  r.iterations = out.iterations;
  r.node_count = 1;
  if (out.status == SolveStatus::Optimal) {
    r.objective = objective_value(m, out.x);
    r.point = detail::make_point(out.x);
  }
  return r;
}

// Best-bound branch and bound over the simplex relaxation. Branching picks the
// most fractional integer variable, ties broken by lowest index; open nodes
// are ordered by parent bound then creation order, so runs are reproducible.
inline SolveResult solve_milp(const StandardFormModel& m, const SolverConfig& cfg = {}) {
  cfg.validate();
  require_valid(m);
  if (m.has_quadratic()) throw data_error("solve_milp: quadratic objective requires linearization first");

  const std::size_t n = m.num_vars();
  const auto lp = lp::make_lp(m);
  const auto opts = detail::lp_options(cfg);
  const double sign = m.sense == Sense::Max ? -1.0 : 1.0;

  std::vector<double> root_lb = m.lb, root_ub = m.ub;
  std::vector<std::size_t> ints;
  for (std::size_t j = 0; j < n; ++j) {
    if (!is_integral_type(m.vartype[j])) continue;
    ints.push_back(j);
    root_lb[j] = std::ceil(root_lb[j] - cfg.int_tol);
    root_ub[j] = std::floor(root_ub[j] + cfg.int_tol);
  }

  SolveResult res;
  for (std::size_t j = 0; j < n; ++j)
    if (root_lb[j] > root_ub[j]) {
      res.status = SolveStatus::Infeasible;
      return res;
    }

  struct Node {
    double bound;
    std::size_t id;
    std::vector<double> lb, ub;
    std::shared_ptr<const lp::WarmStart> start;  // parent's final basis
  };
  struct Worse {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };
  std::priority_queue<Node, std::vector<Node>, Worse> open;
  std::size_t next_id = 0;
  open.push(Node{-kInf, next_id++, root_lb, root_ub, nullptr});

  bool have_inc = false;
  double inc = kInf;  // minimization form
  std::vector<double> inc_x;
  bool root_unbounded = false;

  auto prune_tol = [&] { return std::max(cfg.opt_gap, 1e-12 * std::abs(inc)); };

  auto snap = [&](std::vector<double> x) {
    for (auto j : ints) x[j] = std::round(x[j]);
    return x;
  };

  auto offer = [&](const std::vector<double>& x, double obj, const lp::WarmStart* start) {
    // Polish: fix integers at their rounded values and re-solve the
    // continuous part so the stored point carries exact integers.
    std::vector<double> plb = m.lb, pub = m.ub;
    const auto xs = snap(x);
    for (auto j : ints) plb[j] = pub[j] = xs[j];
    auto pol = ints.empty() ? lp::LpOutcome{} : lp::solve(lp, plb, pub, opts, start);
    res.iterations += pol.iterations;
    std::vector<double> cand = xs;
    double cand_obj = obj;
    if (pol.status == SolveStatus::Optimal) {
      cand = snap(pol.x);
      cand_obj = pol.objective;
    } else {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += lp.cost[j] * cand[j];
      cand_obj = s;
    }
    if (!evaluate_point(m, Point{cand}, FeasibilityTolerance{cfg.feas_tol, 0.0, cfg.int_tol}).feasible) {
      if (!evaluate_point(m, Point{x}, FeasibilityTolerance{cfg.feas_tol, 0.0, cfg.int_tol}).feasible) return;
      cand = x;
      cand_obj = obj;
    }
    if (!have_inc || cand_obj < inc) {
      have_inc = true;
      inc = cand_obj;
      inc_x = std::move(cand);
    }
  };

  while (!open.empty()) {
    if (res.node_count >= cfg.node_limit) break;
    Node node = open.top();
    open.pop();
    if (have_inc && node.bound >= inc - prune_tol()) continue;

    auto out = lp::solve(lp, node.lb, node.ub, opts, node.start.get());
    ++res.node_count;
    res.iterations += out.iterations;
    if (out.status == SolveStatus::Infeasible) continue;
    if (out.status == SolveStatus::Unbounded) {
      if (res.node_count == 1) root_unbounded = true;
      break;
    }
    if (out.status == SolveStatus::IterLimit) {
      res.diagnostic = "simplex iteration limit reached in node relaxation";
      break;
    }
    if (have_inc && out.objective >= inc - prune_tol()) continue;

    std::size_t branch = n;
    double best_frac = 0.0;
    for (auto j : ints) {
      const double f = out.x[j] - std::floor(out.x[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist > cfg.int_tol && dist > best_frac + 1e-12) {
        best_frac = dist;
        branch = j;
      }
    }
    if (branch == n) {
      offer(out.x, out.objective, out.basis ? &*out.basis : nullptr);
      continue;
    }
    const double v = out.x[branch];
    std::shared_ptr<const lp::WarmStart> start;
    if (out.basis) start = std::make_shared<const lp::WarmStart>(std::move(*out.basis));
    Node down{out.objective, next_id++, node.lb, node.ub, start};
    down.ub[branch] = std::floor(v);
    Node up{out.objective, next_id++, std::move(node.lb), std::move(node.ub), start};
    up.lb[branch] = std::ceil(v);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  if (root_unbounded) {
    res.status = SolveStatus::Unbounded;
    return res;
  }

  const bool finished = open.empty() && res.diagnostic.empty();
  double bound = have_inc ? inc : kInf;
  while (!open.empty()) {
    bound = std::min(bound, open.top().bound);
    open.pop();
  }

  if (finished) {
    if (!have_inc) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    res.status = SolveStatus::Optimal;
    res.objective = objective_value(m, inc_x);
    res.point = Point{inc_x};
    return res;
  }

  res.status = SolveStatus::IterLimit;
  if (res.diagnostic.empty()) res.diagnostic = "node limit reached";
  if (std::isfinite(bound)) res.best_bound = sign * bound;
  if (have_inc) {
    res.best_objective = objective_value(m, inc_x);
    res.best_point = Point{inc_x};
  }
  return res;
}

}  // namespace optbind
