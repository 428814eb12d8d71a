#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "optbind/formulas.hpp"
#include "optbind/generators/category.hpp"

namespace optbind {

namespace detail {

inline double poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  double p = 1.0;
  int k = 0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return static_cast<double>(k - 1);
}

struct StaffingLevel {
  int servers;
  double cost;
};

// Candidate staffing levels for one station and shift: the smallest stable
// level meeting the service target and the next levels above it, each with
// wages plus the expected waiting cost over the shift.
inline std::vector<StaffingLevel> staffing_levels(double arrivals_per_hour, double service_rate, double wage,
                                                  double wait_cost, double shift_hours, double target_minutes,
                                                  double max_late_fraction, std::size_t count) {
  if (!(service_rate > 0)) throw data_error("service_rate must be positive");
  const double load = arrivals_per_hour / service_rate;
  int k = static_cast<int>(std::floor(load)) + 1;
  while (erlang_c_wait_exceeds(k, load, target_minutes / 60.0 * service_rate) > max_late_fraction) ++k;
  std::vector<StaffingLevel> out;
  for (std::size_t i = 0; i < count; ++i, ++k) {
    const double wq_hours = erlang_c_mean_wait(k, load) / service_rate;
    out.push_back({k, wage * k + wait_cost * arrivals_per_hour * shift_hours * wq_hours});
  }
  return out;
}

}  // namespace detail

inline void sample_queuing_staffing(WorldState& w, Rng& rng) {
  const std::size_t ns = w.count("num_stations");
  const std::size_t nt = w.count("num_shifts");
  const std::size_t nd = w.count("num_days");
  std::vector<double> rate(ns), wage(ns), history(ns * nt * nd);
  for (std::size_t s = 0; s < ns; ++s) {
    rate[s] = gen::draw2(rng, 4, 12);
    wage[s] = gen::draw2(rng, 120, 320);
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const double base = rng.uniform(5, 40);
    for (std::size_t t = 0; t < nt; ++t) {
      const double mean = base * rng.uniform(0.5, 1.5);
      for (std::size_t d = 0; d < nd; ++d) history[(s * nt + t) * nd + d] = detail::poisson(rng, mean);
    }
  }
  w.params["arrival_history"] = Array{{ns, nt, nd}, history};
  w.params["service_rate"] = Array::vector(rate);
  w.params["wage"] = Array::vector(wage);
  w.params["wait_cost"] = Array::scalar(gen::draw2(rng, 20, 60));
  w.params["shift_hours"] = Array::scalar(8.0);
  w.params["target_wait_minutes"] = Array::scalar(5.0);
  w.params["max_late_fraction"] = Array::scalar(0.2);
  // The pool is set large enough never to bind; it documents headcount.
  std::vector<double> pool(nt, 0.0);
  const std::size_t levels = w.count("num_levels");
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t s = 0; s < ns; ++s) {
      double sum = 0.0;
      for (std::size_t d = 0; d < nd; ++d) sum += history[(s * nt + t) * nd + d];
      const auto lv = detail::staffing_levels(sum / static_cast<double>(nd), rate[s], wage[s], 0.0, 8.0, 5.0, 0.2,
                                              levels);
      pool[t] += lv.back().servers;
    }
    pool[t] += static_cast<double>(rng.integer(0, 5));
  }
  w.params["staff_pool"] = Array::vector(pool);
  w.meta["ranges"] = {{"service_rate", "U[4,12] per hour"},       {"wage", "U[120,320] per shift"},
                      {"base_arrivals", "U[5,40] per hour"},      {"shift_factor", "U[0.5,1.5]"},
                      {"wait_cost", "U[20,60] per customer-hour"}, {"history", "Poisson counts"}};
}

// Staffing as a choice among precomputed levels: y[s][t][k] = 1 selects the
// k-th admissible level for station s in shift t. Arrival rates are the means
// of the recorded history; the service target and waiting cost come from the
// Erlang C model.
inline Formulation formulate_queuing_staffing(const WorldState& w) {
  const std::size_t ns = w.count("num_stations");
  const std::size_t nt = w.count("num_shifts");
  const std::size_t nd = w.count("num_days");
  const std::size_t nl = w.count("num_levels");
  if (nd == 0) throw data_error("num_days must be positive");
  const auto& hist = w.param("arrival_history");
  const auto& rate = w.param("service_rate");
  const auto& wage = w.param("wage");
  const auto& pool = w.param("staff_pool");
  const double wait_cost = w.param("wait_cost").value();
  const double hours = w.param("shift_hours").value();
  const double target = w.param("target_wait_minutes").value();
  const double late = w.param("max_late_fraction").value();

  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::vector<std::pair<std::size_t, int>>> pool_terms(nt);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < nt; ++t) {
      double sum = 0.0;
      for (std::size_t d = 0; d < nd; ++d) sum += hist(s, t, d);
      const auto levels = detail::staffing_levels(sum / static_cast<double>(nd), rate(s), wage(s), wait_cost, hours,
                                                  target, late, nl);
      gen::Terms pick;
      for (const auto& lv : levels) {
        const auto v = b.var("staff_" + gen::label("S", s) + "_" + gen::label("T", t) + "_K" + std::to_string(lv.servers),
                             lv.cost, 0.0, 1.0, VarType::Binary);
        pick.emplace_back(v, 1.0);
        pool_terms[t].emplace_back(v, lv.servers);
      }
      b.row("choose_" + gen::label("S", s) + "_" + gen::label("T", t), pick, RowSense::EQ, 1.0);
    }
  for (std::size_t t = 0; t < nt; ++t) {
    gen::Terms terms;
    for (auto [v, k] : pool_terms[t]) terms.emplace_back(v, static_cast<double>(k));
    b.row("pool_" + gen::label("T", t), terms, RowSense::LE, pool(t));
  }
  return b.finish();
}

inline CategoryDef queuing_staffing_def() {
  CategoryDef d{Category::QueuingStaffing};
  d.ranges = {{"num_stations", 1, 20, 3, 4},
              {"num_shifts", 1, 12, 3, 4},
              {"num_days", 1, 400, 7, 30},
              {"num_levels", 1, 8, 4, 4}};
  d.large = {{"num_stations", 12}, {"num_shifts", 8}, {"num_days", 240}, {"num_levels", 4}};
  d.schema.dims = {"num_stations", "num_shifts", "num_days", "num_levels"};
  d.schema.fields = {
      {"arrival_history", {"num_stations", "num_shifts", "num_days"}, ElementType::Int,
       "customers per hour observed on past days"},
      {"service_rate", {"num_stations"}, ElementType::Float, "customers served per hour by one agent"},
      {"wage", {"num_stations"}, ElementType::Float, "cost of one agent for one shift"},
      {"wait_cost", {}, ElementType::Float, "cost per customer-hour spent waiting"},
      {"shift_hours", {}, ElementType::Float, "length of a shift in hours"},
      {"target_wait_minutes", {}, ElementType::Float, "service target wait"},
      {"max_late_fraction", {}, ElementType::Float, "largest allowed share of customers waiting beyond the target"},
      {"staff_pool", {"num_shifts"}, ElementType::Int, "agents available across all stations in a shift"},
  };
  d.sample = sample_queuing_staffing;
  d.formulate = formulate_queuing_staffing;
  return d;
}

}  // namespace optbind
