#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "optbind/branch_bound.hpp"
#include "optbind/model.hpp"
#include "optbind/solver_types.hpp"

namespace optbind {

struct Linearization {
  StandardFormModel model;  // original variables first, then one epigraph variable per quadratic term
  double error_bound = 0.0;
  std::size_t original_vars = 0;
};

// Replaces each q_j x_j^2 by q_j t_j with t_j above every chord of x^2 on an
// even grid of `segments` pieces over [lb_j, ub_j].
inline Linearization linearize_quadratic(const StandardFormModel& m, int segments) {
  require_valid(m);
  if (segments < 1) throw usage_error("linearize_quadratic: segments must be positive");
  if (!m.q_diag) throw data_error("linearize_quadratic: model has no quadratic terms");
  if (m.sense != Sense::Min) throw data_error("linearize_quadratic: convex quadratic objective must be minimized");

  Linearization out;
  out.model = m;
  out.model.q_diag.reset();
  out.original_vars = m.num_vars();
  const auto& q = *m.q_diag;
  auto& r = out.model;
  std::size_t row = r.num_rows();
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] == 0.0) continue;
    const double lo = m.lb[j], hi = m.ub[j];
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw data_error("linearize_quadratic: variable " + std::to_string(j) + " has a quadratic term but an infinite bound");
    const std::size_t t = r.c.size();
    const double tmax = std::max(lo * lo, hi * hi);
    const double tmin = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
    r.c.push_back(q[j]);
    r.lb.push_back(tmin);
    r.ub.push_back(tmax);
    r.vartype.push_back(VarType::Continuous);
    const double h = (hi - lo) / segments;
    if (h == 0.0) {
      // Fixed variable: t = lo^2 exactly.
      r.lb.back() = r.ub.back() = lo * lo;
      continue;
    }
    for (int k = 0; k < segments; ++k) {
      const double a = lo + h * k;
      const double b = (k + 1 == segments) ? hi : lo + h * (k + 1);
      // chord through (a, a^2), (b, b^2): y = (a + b) x - a b;  t - (a+b) x >= -a b
      r.a.entries.push_back({row, t, 1.0});
      r.a.entries.push_back({row, j, -(a + b)});
      r.row_sense.push_back(RowSense::GE);
      r.b.push_back(-a * b);
      ++row;
    }
    out.error_bound += q[j] * (hi - lo) * (hi - lo) / (4.0 * segments * segments);
  }
  r.a.rows = r.num_rows();
  r.a.cols = r.num_vars();
  std::sort(r.a.entries.begin(), r.a.entries.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  return out;
}

// Solves a convex separable MIQP by piecewise linearization, returning the
// point restricted to the original variables and its true objective.
inline SolveResult solve_linearized(const StandardFormModel& m, const SolverConfig& cfg = {}) {
  const auto lin = linearize_quadratic(m, cfg.qp_segments);
  auto r = solve_milp(lin.model, cfg);
  auto restrict_point = [&](std::optional<Point>& p, std::optional<double>& obj) {
    if (!p) return;
    p->x.resize(lin.original_vars);
    obj = objective_value(m, p->x);
  };
  restrict_point(r.point, r.objective);
  restrict_point(r.best_point, r.best_objective);
  return r;
}

// Outer approximation for a convex separable MIQP: repeatedly solves the MILP
// with tangent cuts t_j >= 2 x0 x_j - x0^2 (a lower model), evaluates the true
// objective at its solution (an upper bound), and adds cuts at that point
// until the two agree within `rel_gap`.
inline SolveResult solve_miqp(const StandardFormModel& m, const SolverConfig& cfg = {}, double rel_gap = 1e-9,
                              int max_rounds = 200) {
  require_valid(m);
  if (!m.q_diag) return solve_milp(m, cfg);
  if (m.sense != Sense::Min) throw data_error("solve_miqp: convex quadratic objective must be minimized");
  const auto& q = *m.q_diag;

  StandardFormModel w = m;
  w.q_diag.reset();
  std::vector<std::pair<std::size_t, std::size_t>> terms;  // (x index, t index)
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] == 0.0) continue;
    if (!std::isfinite(m.lb[j]) || !std::isfinite(m.ub[j]))
      throw data_error("solve_miqp: variable " + std::to_string(j) + " has a quadratic term but an infinite bound");
    const std::size_t t = w.c.size();
    w.c.push_back(q[j]);
    w.lb.push_back(0.0);
    w.ub.push_back(std::max(m.lb[j] * m.lb[j], m.ub[j] * m.ub[j]));
    w.vartype.push_back(VarType::Continuous);
    terms.emplace_back(j, t);
  }
  w.a.cols = w.num_vars();

  auto add_cut = [&](std::size_t j, std::size_t t, double x0) {
    const std::size_t row = w.num_rows();
    w.a.entries.push_back({row, t, 1.0});
    if (x0 != 0.0) w.a.entries.push_back({row, j, -2.0 * x0});
    w.row_sense.push_back(RowSense::GE);
    w.b.push_back(-x0 * x0);
    w.a.rows = w.num_rows();
  };
  for (auto [j, t] : terms) {
    add_cut(j, t, m.lb[j]);
    add_cut(j, t, m.ub[j]);
    add_cut(j, t, 0.5 * (m.lb[j] + m.ub[j]));
  }

  SolveResult best;
  best.status = SolveStatus::Infeasible;
  double upper = kInf;
  std::vector<double> best_x;
  std::size_t nodes = 0, iters = 0;
  for (int round = 0; round < max_rounds; ++round) {
    auto r = solve_milp(w, cfg);
    nodes += r.node_count;
    iters += r.iterations;
    if (r.status != SolveStatus::Optimal) {
      if (!best_x.empty()) break;
      SolveResult fail;
      fail.status = r.status;
      fail.node_count = nodes;
      fail.iterations = iters;
      fail.diagnostic = r.diagnostic;
      return fail;
    }
    const double lower = *r.objective;
    std::vector<double> x(r.point->x.begin(), r.point->x.begin() + static_cast<std::ptrdiff_t>(m.num_vars()));
    const double val = objective_value(m, x);
    if (val < upper) {
      upper = val;
      best_x = x;
    }
    if (upper - lower <= rel_gap * std::max(1.0, std::abs(upper))) break;
    bool added = false;
    for (auto [j, t] : terms) {
      const double xt = r.point->x[j];
      if (q[j] * (xt * xt - r.point->x[t]) > 1e-12 * std::max(1.0, std::abs(upper))) {
        add_cut(j, t, xt);
        added = true;
      }
    }
    if (!added) break;
  }
  best.node_count = nodes;
  best.iterations = iters;
  if (best_x.empty()) {
    best.status = SolveStatus::IterLimit;
    best.diagnostic = "outer approximation produced no incumbent";
    return best;
  }
  best.status = SolveStatus::Optimal;
  best.objective = upper;
  best.point = Point{best_x};
  return best;
}

}  // namespace optbind
