#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "optbind/generators/category.hpp"

namespace optbind {

namespace detail {

inline std::size_t rcpsp_horizon(const WorldState& w) {
  const std::size_t na = w.count("num_activities");
  const std::size_t nmode = w.count("num_modes");
  const auto& dur = w.param("durations");
  const auto& lag = w.param("lag");
  double h = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    double mx = 0.0;
    for (std::size_t m = 0; m < nmode; ++m) mx = std::max(mx, dur(a, m));
    h += mx;
  }
  for (double v : lag.data) h += v;
  return static_cast<std::size_t>(h);
}

}  // namespace detail

// Multi-mode project with one renewable resource. The anchor picks a mode per
// activity and schedules with the serial scheme; capacity, budget and
// deadline are then set so that schedule is admissible.
inline void sample_rcpsp(WorldState& w, Rng& rng) {
  const std::size_t na = w.count("num_activities");
  const std::size_t nmode = w.count("num_modes");
  w.dims["num_precedences"] = static_cast<std::int64_t>(na - 1);
  std::vector<double> dur(na * nmode), use(na * nmode), cost(na * nmode), pred, succ, lag;
  for (std::size_t k = 0; k < na * nmode; ++k) {
    dur[k] = static_cast<double>(rng.integer(1, 3));
    use[k] = static_cast<double>(rng.integer(1, 5));
    cost[k] = gen::draw2(rng, 5, 30);
  }
  // Every activity after the first has one predecessor with a smaller index.
  for (std::size_t b = 1; b < na; ++b) {
    pred.push_back(static_cast<double>(rng.index(b)));
    succ.push_back(static_cast<double>(b));
    lag.push_back(static_cast<double>(rng.integer(0, 1)));
  }
  std::vector<std::size_t> mode(na);
  for (auto& m : mode) m = rng.index(nmode);
  double peak = 0.0;
  for (std::size_t a = 0; a < na; ++a) peak = std::max(peak, use[a * nmode + mode[a]]);
  const double capacity = peak + static_cast<double>(rng.integer(0, 2));

  // Serial schedule generation in index order (a topological order here).
  std::vector<double> start(na, 0.0), profile;
  for (std::size_t a = 0; a < na; ++a) {
    double earliest = 0.0;
    for (std::size_t p = 0; p + 1 < na; ++p)
      if (static_cast<std::size_t>(succ[p]) == a) {
        const auto before = static_cast<std::size_t>(pred[p]);
        earliest = std::max(earliest, start[before] + dur[before * nmode + mode[before]] + lag[p]);
      }
    const auto d = static_cast<std::size_t>(dur[a * nmode + mode[a]]);
    const double r = use[a * nmode + mode[a]];
    auto st = static_cast<std::size_t>(earliest);
    for (;; ++st) {
      if (profile.size() < st + d) profile.resize(st + d, 0.0);
      bool ok = true;
      for (std::size_t tau = st; tau < st + d; ++tau) ok = ok && profile[tau] + r <= capacity;
      if (ok) break;
    }
    for (std::size_t tau = st; tau < st + d; ++tau) profile[tau] += r;
    start[a] = static_cast<double>(st);
  }
  double makespan = 0.0, spend = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    makespan = std::max(makespan, start[a] + dur[a * nmode + mode[a]]);
    spend += cost[a * nmode + mode[a]];
  }

  w.params["durations"] = Array::matrix(na, nmode, dur);
  w.params["resource_use"] = Array::matrix(na, nmode, use);
  w.params["mode_cost"] = Array::matrix(na, nmode, cost);
  w.params["predecessor"] = Array::vector(pred);
  w.params["successor"] = Array::vector(succ);
  w.params["lag"] = Array::vector(lag);
  w.params["resource_capacity"] = Array::scalar(capacity);
  w.params["budget"] = Array::scalar(gen::ceil2(spend + rng.uniform(0, 10)));
  const double horizon = static_cast<double>(detail::rcpsp_horizon(w));
  w.params["deadline"] = Array::scalar(std::min(horizon, makespan + static_cast<double>(rng.integer(0, 2))));
  std::vector<double> anchor_mode(mode.begin(), mode.end());
  w.params["anchor_mode"] = Array::vector(anchor_mode);
  w.params["anchor_start"] = Array::vector(start);
  w.meta["ranges"] = {{"durations", "U{1..3}"}, {"resource_use", "U{1..5}"}, {"mode_cost", "U[5,30]"},
                      {"lag", "U{0..1}"}};
  w.meta["horizon"] = "sum over activities of the longest mode duration plus all lags";
}

// Time-indexed formulation: x[a][m][t] = 1 when activity a runs in mode m
// starting at period t.
inline Formulation formulate_rcpsp(const WorldState& w) {
  const std::size_t na = w.count("num_activities");
  const std::size_t nmode = w.count("num_modes");
  const std::size_t np = w.count("num_precedences");
  const auto& dur = w.param("durations");
  const auto& use = w.param("resource_use");
  const auto& cost = w.param("mode_cost");
  const auto& pred = w.param("predecessor");
  const auto& succ = w.param("successor");
  const auto& lag = w.param("lag");
  const double capacity = w.param("resource_capacity").value();
  const double budget = w.param("budget").value();
  const double deadline = w.param("deadline").value();
  for (double v : dur.data)
    if (v < 1) throw data_error("durations must be at least 1");
  for (std::size_t p = 0; p < np; ++p)
    if (pred(p) < 0 || pred(p) >= static_cast<double>(na) || succ(p) < 0 || succ(p) >= static_cast<double>(na))
      throw data_error("precedence " + std::to_string(p) + " references an unknown activity");
  const std::size_t horizon = detail::rcpsp_horizon(w);

  gen::FormulationBuilder b(Sense::Min);
  struct Start {
    std::size_t var, a, m, t;
  };
  std::vector<Start> starts;
  std::vector<std::vector<std::size_t>> by_activity(na);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t m = 0; m < nmode; ++m) {
      const auto d = static_cast<std::size_t>(dur(a, m));
      for (std::size_t t = 0; t + d <= horizon; ++t) {
        const auto v = b.var("x_" + gen::label("A", a) + "_" + gen::label("M", m) + "_T" + std::to_string(t), 0.0,
                             0.0, 1.0, VarType::Binary);
        by_activity[a].push_back(starts.size());
        starts.push_back({v, a, m, t});
      }
    }
  const std::size_t cmax = b.var("makespan", 1.0, 0.0, deadline);

  for (std::size_t a = 0; a < na; ++a) {
    gen::Terms t;
    for (auto k : by_activity[a]) t.emplace_back(starts[k].var, 1.0);
    b.row("assign_" + gen::label("A", a), t, RowSense::EQ, 1.0);
  }
  for (std::size_t p = 0; p < np; ++p) {
    const auto pa = static_cast<std::size_t>(pred(p)), pb = static_cast<std::size_t>(succ(p));
    gen::Terms t;
    for (auto k : by_activity[pb]) t.emplace_back(starts[k].var, static_cast<double>(starts[k].t));
    for (auto k : by_activity[pa])
      t.emplace_back(starts[k].var, -(static_cast<double>(starts[k].t) + dur(pa, starts[k].m)));
    b.row("precedence_" + std::to_string(p + 1), t, RowSense::GE, lag(p));
  }
  for (std::size_t a = 0; a < na; ++a) {
    gen::Terms t{{cmax, 1.0}};
    for (auto k : by_activity[a]) t.emplace_back(starts[k].var, -(static_cast<double>(starts[k].t) + dur(a, starts[k].m)));
    b.row("finish_" + gen::label("A", a), t, RowSense::GE, 0.0);
  }
  for (std::size_t tau = 0; tau < horizon; ++tau) {
    gen::Terms t;
    for (const auto& s : starts)
      if (s.t <= tau && tau < s.t + static_cast<std::size_t>(dur(s.a, s.m))) t.emplace_back(s.var, use(s.a, s.m));
    b.row("resource_T" + std::to_string(tau), t, RowSense::LE, capacity);
  }
  {
    gen::Terms t;
    for (const auto& s : starts) t.emplace_back(s.var, cost(s.a, s.m));
    b.row("budget", t, RowSense::LE, budget);
  }
  return b.finish();
}

inline CategoryDef rcpsp_def() {
  CategoryDef d{Category::Rcpsp};
  d.ranges = {{"num_activities", 2, 8, 3, 4}, {"num_modes", 1, 3, 2, 2}};
  d.schema.dims = {"num_activities", "num_modes", "num_precedences"};
  d.schema.fields = {
      {"durations", {"num_activities", "num_modes"}, ElementType::Int, "periods per activity and mode"},
      {"resource_use", {"num_activities", "num_modes"}, ElementType::Int, "resource units per period"},
      {"mode_cost", {"num_activities", "num_modes"}, ElementType::Float, "cost of running the activity in that mode"},
      {"predecessor", {"num_precedences"}, ElementType::Int, "activity (zero-based) that must finish first"},
      {"successor", {"num_precedences"}, ElementType::Int, "activity (zero-based) that waits for it"},
      {"lag", {"num_precedences"}, ElementType::Int, "minimum periods between the two"},
      {"resource_capacity", {}, ElementType::Int, "resource units available each period"},
      {"budget", {}, ElementType::Float, "total spending limit"},
      {"deadline", {}, ElementType::Int, "latest completion period"},
  };
  d.sample = sample_rcpsp;
  d.formulate = formulate_rcpsp;
  return d;
}

}  // namespace optbind
