#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "optbind/generators/category.hpp"

namespace optbind {

inline void sample_stochastic_transportation(WorldState& w, Rng& rng) {
  const std::size_t ns = w.count("num_sources");
  const std::size_t nd = w.count("num_destinations");
  const std::size_t nk = w.count("num_scenarios");
  std::vector<double> base(nd), scen(nk * nd), cost(ns * nd), penalty(nd), supply(ns);
  for (auto& v : base) v = rng.uniform(20, 80);
  // Supplies cover the per-destination peak over all scenarios, so the
  // all-covered plan is feasible.
  std::vector<double> peak(nd, 0.0);
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t j = 0; j < nd; ++j) {
      scen[k * nd + j] = std::max(1.0, std::round(base[j] * rng.uniform(0.6, 1.4)));
      peak[j] = std::max(peak[j], scen[k * nd + j]);
    }
  const double worst = std::accumulate(peak.begin(), peak.end(), 0.0);
  std::vector<double> share(ns);
  for (auto& v : share) v = rng.uniform(0.5, 1.5);
  const double sum_share = std::accumulate(share.begin(), share.end(), 0.0);
  const double margin = rng.uniform(1.05, 1.3);
  for (std::size_t i = 0; i < ns; ++i) supply[i] = std::ceil(worst * margin * share[i] / sum_share);
  for (auto& v : cost) v = gen::draw2(rng, 5, 30);
  for (auto& v : penalty) v = gen::draw2(rng, 40, 80);
  w.params["supplies"] = Array::vector(supply);
  w.params["costs"] = Array::matrix(ns, nd, cost);
  w.params["scenario_demand"] = Array::matrix(nk, nd, scen);
  w.params["shortage_penalty"] = Array::vector(penalty);
  w.params["risk_level"] = Array::scalar(0.1);
  w.meta["ranges"] = {{"costs", "U[5,30]"}, {"scenario_demand", "base U[20,80] * U[0.6,1.4]"},
                      {"shortage_penalty", "U[40,80]"}, {"supply_margin", "sum of per-destination peaks * U[1.05,1.3]"}};
  w.meta["risk_level_default"] = 0.1;
}

// Sample average approximation over equiprobable demand scenarios.
// z[k] = 1 marks scenarios whose demand the shipments must cover in full, and
// at least ceil((1 - risk) * K) of them must be covered. Shortfalls in any
// scenario are charged at the penalty weighted by 1/K.
inline Formulation formulate_stochastic_transportation(const WorldState& w) {
  const std::size_t ns = w.count("num_sources");
  const std::size_t nd = w.count("num_destinations");
  const std::size_t nk = w.count("num_scenarios");
  const auto& supply = w.param("supplies");
  const auto& cost = w.param("costs");
  const auto& scen = w.param("scenario_demand");
  const auto& penalty = w.param("shortage_penalty");
  const double risk = w.param("risk_level").value();
  if (!(risk >= 0 && risk < 1)) throw data_error("risk_level must lie in [0, 1)");
  const double weight = 1.0 / static_cast<double>(nk);

  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::size_t> x(ns * nd), z(nk), u(nk * nd);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nd; ++j)
      x[i * nd + j] = b.var("x_" + gen::label("S", i) + "_" + gen::label("D", j), cost(i, j), 0.0, kInf);
  for (std::size_t k = 0; k < nk; ++k) z[k] = b.var(gen::label("covered_K", k), 0.0, 0.0, 1.0, VarType::Binary);
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t j = 0; j < nd; ++j)
      u[k * nd + j] = b.var("short_" + gen::label("K", k) + "_" + gen::label("D", j), penalty(j) * weight, 0.0, kInf);

  for (std::size_t i = 0; i < ns; ++i) {
    gen::Terms t;
    for (std::size_t j = 0; j < nd; ++j) t.emplace_back(x[i * nd + j], 1.0);
    b.row("supply_" + gen::label("S", i), t, RowSense::LE, supply(i));
  }
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t j = 0; j < nd; ++j) {
      gen::Terms cover{{z[k], -scen(k, j)}}, recourse{{u[k * nd + j], 1.0}};
      for (std::size_t i = 0; i < ns; ++i) {
        cover.emplace_back(x[i * nd + j], 1.0);
        recourse.emplace_back(x[i * nd + j], 1.0);
      }
      b.row("cover_" + gen::label("K", k) + "_" + gen::label("D", j), cover, RowSense::GE, 0.0);
      b.row("recourse_" + gen::label("K", k) + "_" + gen::label("D", j), recourse, RowSense::GE, scen(k, j));
    }
  {
    gen::Terms t;
    for (std::size_t k = 0; k < nk; ++k) t.emplace_back(z[k], 1.0);
    b.row("chance", t, RowSense::GE, std::ceil((1.0 - risk) * static_cast<double>(nk) - 1e-9));
  }
  return b.finish();
}

inline CategoryDef stochastic_transportation_def() {
  CategoryDef d{Category::StochasticTransportation};
  d.ranges = {{"num_sources", 1, 10, 2, 3}, {"num_destinations", 1, 12, 2, 4}, {"num_scenarios", 2, 50, 10, 10}};
  d.schema.dims = {"num_sources", "num_destinations", "num_scenarios"};
  d.schema.fields = {
      {"supplies", {"num_sources"}, ElementType::Int, "units available at each source"},
      {"costs", {"num_sources", "num_destinations"}, ElementType::Float, "cost per unit shipped"},
      {"scenario_demand", {"num_scenarios", "num_destinations"}, ElementType::Int,
       "demand under each equally likely scenario"},
      {"shortage_penalty", {"num_destinations"}, ElementType::Float, "penalty per unit short in a scenario"},
      {"risk_level", {}, ElementType::Float, "largest share of scenarios allowed to go uncovered"},
  };
  d.sample = sample_stochastic_transportation;
  d.formulate = formulate_stochastic_transportation;
  return d;
}

}  // namespace optbind
