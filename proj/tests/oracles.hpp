#pragma once

// Independent reference solvers used only by the tests. They are slow and
// only meant for models with a handful of bounded variables.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "optbind/model.hpp"

namespace oracle {

using optbind::RowSense;
using optbind::StandardFormModel;

struct Halfspace {
  std::vector<double> a;  // a x <= b
  double b;
  bool equality = false;
};

inline std::vector<Halfspace> halfspaces(const StandardFormModel& m, const std::vector<double>& lb,
                                         const std::vector<double>& ub) {
  const std::size_t n = m.num_vars();
  auto dense = optbind::to_dense(m);
  std::vector<Halfspace> hs;
  for (std::size_t i = 0; i < m.num_rows(); ++i) {
    Halfspace h{dense[i], m.b[i]};
    if (m.row_sense[i] == RowSense::GE) {
      for (auto& v : h.a) v = -v;
      h.b = -h.b;
    }
    h.equality = m.row_sense[i] == RowSense::EQ;
    hs.push_back(h);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Halfspace up{std::vector<double>(n, 0.0), ub[j]};
    up.a[j] = 1.0;
    Halfspace dn{std::vector<double>(n, 0.0), -lb[j]};
    dn.a[j] = -1.0;
    if (lb[j] == ub[j]) {
      up.equality = true;
      hs.push_back(up);
    } else {
      hs.push_back(up);
      hs.push_back(dn);
    }
  }
  return hs;
}

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Optimal objective (in the model's own sense) of the LP relaxation restricted
// to the given bounds, by enumerating every vertex. All bounds must be finite.
inline std::optional<double> lp_by_vertices(const StandardFormModel& m, const std::vector<double>& lb,
                                            const std::vector<double>& ub) {
  const std::size_t n = m.num_vars();
  const auto hs = halfspaces(m, lb, ub);
  const double sign = m.sense == optbind::Sense::Max ? -1.0 : 1.0;
  std::optional<double> best;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == n) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (auto k : pick) {
        a.push_back(hs[k].a);
        b.push_back(hs[k].b);
      }
      auto x = solve_square(a, b);
      if (!x) return;
      for (const auto& h : hs) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) s += h.a[j] * (*x)[j];
        if (s > h.b + 1e-7) return;
        if (h.equality && s < h.b - 1e-7) return;
      }
      double obj = 0;
      for (std::size_t j = 0; j < n; ++j) obj += m.c[j] * (*x)[j];
      if (!best || sign * obj < sign * *best) best = obj;
      return;
    }
    for (std::size_t k = start; k < hs.size(); ++k) {
      pick.push_back(k);
      rec(k + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

// Mixed-integer optimum by enumerating every integer assignment and solving
// the continuous remainder by vertex enumeration.
inline std::optional<double> milp_by_enumeration(const StandardFormModel& m) {
  const std::size_t n = m.num_vars();
  std::vector<std::size_t> ints;
  for (std::size_t j = 0; j < n; ++j)
    if (optbind::is_integral_type(m.vartype[j])) ints.push_back(j);
  const double sign = m.sense == optbind::Sense::Max ? -1.0 : 1.0;
  std::vector<double> lb = m.lb, ub = m.ub;
  for (auto j : ints) {
    lb[j] = std::ceil(lb[j] - 1e-9);
    ub[j] = std::floor(ub[j] + 1e-9);
  }
  std::optional<double> best;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == ints.size()) {
      auto v = lp_by_vertices(m, lb, ub);
      if (v && (!best || sign * *v < sign * *best)) best = v;
      return;
    }
    const std::size_t j = ints[k];
    const double lo = std::ceil(m.lb[j] - 1e-9), hi = std::floor(m.ub[j] + 1e-9);
    for (double v = lo; v <= hi; v += 1.0) {
      lb[j] = ub[j] = v;
      rec(k + 1);
    }
    lb[j] = lo;
    ub[j] = hi;
  };
  rec(0);
  return best;
}

}  // namespace oracle
