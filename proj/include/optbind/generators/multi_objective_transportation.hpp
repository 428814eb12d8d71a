#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "optbind/generators/category.hpp"

namespace optbind {

inline constexpr double kDefaultEmissionWeight = 2.0;

inline void sample_multi_objective_transportation(WorldState& w, Rng& rng) {
  const std::size_t ns = w.count("num_suppliers");
  const std::size_t nd = w.count("num_destinations");
  std::vector<double> demand(nd), cost(ns * nd), emis(ns * nd), cap(ns), moq(ns), fixed(ns);
  for (auto& v : demand) v = static_cast<double>(rng.integer(10, 100));
  for (auto& v : cost) v = gen::draw2(rng, 5, 30);
  for (auto& v : emis) v = gen::draw2(rng, 0.5, 5);
  for (auto& v : fixed) v = gen::draw2(rng, 200, 1000);

  // Anchor plan: a random set of suppliers serves every destination.
  const std::int64_t k_lo = ns >= 3 ? 2 : 1;
  const auto k = static_cast<std::size_t>(rng.integer(k_lo, std::max<std::int64_t>(k_lo, static_cast<std::int64_t>(ns) - 1)));
  const auto perm = rng.permutation(ns);
  std::vector<double> load(ns, 0.0);
  for (std::size_t j = 0; j < nd; ++j) load[perm[j % k]] += demand[j];
  const double avg = std::accumulate(demand.begin(), demand.end(), 0.0) / static_cast<double>(k);
  for (std::size_t s = 0; s < ns; ++s) {
    const double base = load[s] > 0 ? load[s] : avg;
    cap[s] = std::ceil(base * rng.uniform(1.1, 1.5));
    moq[s] = std::floor(base * rng.uniform(0.3, 0.8));
  }
  w.params["unit_cost"] = Array::matrix(ns, nd, cost);
  w.params["emissions"] = Array::matrix(ns, nd, emis);
  w.params["demand"] = Array::vector(demand);
  w.params["capacity"] = Array::vector(cap);
  w.params["min_order"] = Array::vector(moq);
  w.params["fixed_cost"] = Array::vector(fixed);
  w.params["max_suppliers"] = Array::scalar(static_cast<double>(k));
  w.params["emission_weight"] = Array::scalar(kDefaultEmissionWeight);
  w.meta["ranges"] = {{"unit_cost", "U[5,30]"}, {"emissions", "U[0.5,5]"}, {"demand", "U{10..100}"},
                      {"fixed_cost", "U[200,1000]"}, {"capacity", "anchor load * U[1.1,1.5]"},
                      {"min_order", "anchor load * U[0.3,0.8]"}};
  w.meta["emission_weight_default"] = kDefaultEmissionWeight;
}

// Weighted-sum scalarization: cost + weight * emissions per unit, plus a
// fixed charge for each supplier used. A used supplier ships between its
// minimum order and its capacity; at most max_suppliers may be used.
inline Formulation formulate_multi_objective_transportation(const WorldState& w) {
  const std::size_t ns = w.count("num_suppliers");
  const std::size_t nd = w.count("num_destinations");
  const auto& cost = w.param("unit_cost");
  const auto& emis = w.param("emissions");
  const auto& demand = w.param("demand");
  const auto& cap = w.param("capacity");
  const auto& moq = w.param("min_order");
  const auto& fixed = w.param("fixed_cost");
  const double kmax = w.param("max_suppliers").value();
  const double lambda = w.param("emission_weight").value();

  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::size_t> x(ns * nd), y(ns);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t j = 0; j < nd; ++j)
      x[s * nd + j] = b.var("x_" + gen::label("S", s) + "_" + gen::label("D", j), cost(s, j) + lambda * emis(s, j),
                            0.0, kInf);
  for (std::size_t s = 0; s < ns; ++s) y[s] = b.var("use_" + gen::label("S", s), fixed(s), 0.0, 1.0, VarType::Binary);

  for (std::size_t j = 0; j < nd; ++j) {
    gen::Terms t;
    for (std::size_t s = 0; s < ns; ++s) t.emplace_back(x[s * nd + j], 1.0);
    b.row("demand_" + gen::label("D", j), t, RowSense::EQ, demand(j));
  }
  for (std::size_t s = 0; s < ns; ++s) {
    gen::Terms up{{y[s], -cap(s)}}, down{{y[s], -moq(s)}};
    for (std::size_t j = 0; j < nd; ++j) {
      up.emplace_back(x[s * nd + j], 1.0);
      down.emplace_back(x[s * nd + j], 1.0);
    }
    b.row("capacity_" + gen::label("S", s), up, RowSense::LE, 0.0);
    b.row("min_order_" + gen::label("S", s), down, RowSense::GE, 0.0);
  }
  {
    gen::Terms t;
    for (std::size_t s = 0; s < ns; ++s) t.emplace_back(y[s], 1.0);
    b.row("cardinality", t, RowSense::LE, kmax);
  }
  return b.finish();
}

inline CategoryDef multi_objective_transportation_def() {
  CategoryDef d{Category::MultiObjectiveTransportation};
  d.ranges = {{"num_suppliers", 2, 12, 3, 6}, {"num_destinations", 1, 1500, 3, 10}};
  d.large = {{"num_suppliers", 8}, {"num_destinations", 1100}};
  d.schema.dims = {"num_suppliers", "num_destinations"};
  d.schema.fields = {
      {"unit_cost", {"num_suppliers", "num_destinations"}, ElementType::Float, "cost per unit shipped"},
      {"emissions", {"num_suppliers", "num_destinations"}, ElementType::Float, "kilograms of emissions per unit"},
      {"demand", {"num_destinations"}, ElementType::Int, "units required"},
      {"capacity", {"num_suppliers"}, ElementType::Int, "most units a used supplier can ship"},
      {"min_order", {"num_suppliers"}, ElementType::Int, "fewest units a used supplier must ship"},
      {"fixed_cost", {"num_suppliers"}, ElementType::Float, "charge for using a supplier at all"},
      {"max_suppliers", {}, ElementType::Int, "most suppliers that may be used"},
      {"emission_weight", {}, ElementType::Float, "cost charged per kilogram of emissions"},
  };
  d.sample = sample_multi_objective_transportation;
  d.formulate = formulate_multi_objective_transportation;
  return d;
}

}  // namespace optbind
