#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "optbind/generators/category.hpp"

namespace optbind {

inline void sample_transportation(WorldState& w, Rng& rng) {
  const std::size_t ns = w.count("num_sources");
  const std::size_t nd = w.count("num_destinations");
  std::vector<double> demand(nd), supply(ns), cost(ns * nd);
  for (auto& v : demand) v = static_cast<double>(rng.integer(10, 100));
  for (auto& v : supply) v = static_cast<double>(rng.integer(10, 100));
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
  // Rescale so total supply exceeds total demand by 5 to 30 percent.
  const double factor = total_demand * rng.uniform(1.05, 1.3) / total_supply;
  for (auto& v : supply) v = std::max(1.0, std::ceil(v * factor));
  for (auto& v : cost) v = gen::draw2(rng, 5.0, 30.0);
  w.params["supplies"] = Array::vector(supply);
  w.params["demands"] = Array::vector(demand);
  w.params["costs"] = Array::matrix(ns, nd, cost);
  w.meta["ranges"] = {{"costs", "U[5,30]"}, {"demands", "U{10..100}"}, {"supply_margin", "U[1.05,1.3]"}};
}

inline Formulation formulate_transportation(const WorldState& w) {
  const std::size_t ns = w.count("num_sources");
  const std::size_t nd = w.count("num_destinations");
  const auto& supply = w.param("supplies");
  const auto& demand = w.param("demands");
  const auto& cost = w.param("costs");
  gen::FormulationBuilder b(Sense::Min);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nd; ++j)
      b.var("x_" + gen::label("S", i) + "_" + gen::label("D", j), cost(i, j), 0.0, kInf);
  for (std::size_t i = 0; i < ns; ++i) {
    gen::Terms t;
    for (std::size_t j = 0; j < nd; ++j) t.emplace_back(i * nd + j, 1.0);
    b.row("supply_" + gen::label("S", i), t, RowSense::LE, supply(i));
  }
  for (std::size_t j = 0; j < nd; ++j) {
    gen::Terms t;
    for (std::size_t i = 0; i < ns; ++i) t.emplace_back(i * nd + j, 1.0);
    b.row("demand_" + gen::label("D", j), t, RowSense::EQ, demand(j));
  }
  return b.finish();
}

inline CategoryDef transportation_def() {
  CategoryDef d{Category::Transportation};
  d.ranges = {{"num_sources", 1, 250, 3, 12}, {"num_destinations", 1, 250, 3, 12}};
  d.large = {{"num_sources", 150}, {"num_destinations", 150}};
  d.schema.dims = {"num_sources", "num_destinations"};
  d.schema.fields = {
      {"supplies", {"num_sources"}, ElementType::Int, "units available at each source"},
      {"demands", {"num_destinations"}, ElementType::Int, "units required at each destination"},
      {"costs", {"num_sources", "num_destinations"}, ElementType::Float, "cost per unit shipped"},
  };
  d.sample = sample_transportation;
  d.formulate = formulate_transportation;
  return d;
}

}  // namespace optbind
