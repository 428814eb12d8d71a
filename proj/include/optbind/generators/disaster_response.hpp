#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "optbind/generators/category.hpp"

namespace optbind {

inline void sample_disaster_response(WorldState& w, Rng& rng) {
  const std::size_t nd = w.count("num_depots");
  const std::size_t ns = w.count("num_shelters");
  const std::size_t nt = w.count("num_periods");
  std::vector<double> need(ns * nt);
  for (auto& v : need) v = static_cast<double>(rng.integer(10, 60));
  const double total = std::accumulate(need.begin(), need.end(), 0.0);
  std::vector<double> stock(nd), fleet(nd), unit(nd * ns), secure(nd * ns), penalty(ns);
  for (auto& v : stock) v = std::ceil(total * rng.uniform(0.5, 0.9) / static_cast<double>(nd));
  for (std::size_t d = 0; d < nd; ++d) fleet[d] = std::ceil(stock[d] / static_cast<double>(nt) * rng.uniform(1.0, 1.5));
  for (auto& v : unit) v = gen::draw2(rng, 5, 30);
  for (auto& v : secure) v = gen::draw2(rng, 20, 100);
  for (auto& v : penalty) v = gen::draw2(rng, 40, 80);
  w.params["stock"] = Array::vector(stock);
  w.params["vehicle_capacity"] = Array::vector(fleet);
  w.params["demand"] = Array::matrix(ns, nt, need);
  w.params["unit_cost"] = Array::matrix(nd, ns, unit);
  w.params["security_cost"] = Array::matrix(nd, ns, secure);
  w.params["shortage_penalty"] = Array::vector(penalty);
  w.meta["ranges"] = {{"demand", "U{10..60}"},          {"stock", "total demand * U[0.5,0.9] / depots"},
                      {"unit_cost", "U[5,30]"},         {"security_cost", "U[20,100]"},
                      {"shortage_penalty", "U[40,80]"}, {"vehicle_capacity", "stock / periods * U[1,1.5]"}};
}

// Multi-period relief distribution. A route from depot d to shelter s may
// carry goods only once secured (binary z[d][s], one-off cost); unmet demand
// is allowed at a penalty.
inline Formulation formulate_disaster_response(const WorldState& w) {
  const std::size_t nd = w.count("num_depots");
  const std::size_t ns = w.count("num_shelters");
  const std::size_t nt = w.count("num_periods");
  const auto& stock = w.param("stock");
  const auto& fleet = w.param("vehicle_capacity");
  const auto& need = w.param("demand");
  const auto& unit = w.param("unit_cost");
  const auto& secure = w.param("security_cost");
  const auto& penalty = w.param("shortage_penalty");

  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::size_t> x(nd * ns * nt), z(nd * ns), u(ns * nt);
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t t = 0; t < nt; ++t)
        x[(d * ns + s) * nt + t] = b.var("x_" + gen::label("D", d) + "_" + gen::label("S", s) + "_" + gen::label("T", t),
                                         unit(d, s), 0.0, kInf);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < nt; ++t)
      u[s * nt + t] = b.var("short_" + gen::label("S", s) + "_" + gen::label("T", t), penalty(s), 0.0, kInf);
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t s = 0; s < ns; ++s)
      z[d * ns + s] = b.var("secure_" + gen::label("D", d) + "_" + gen::label("S", s), secure(d, s), 0.0, 1.0,
                            VarType::Binary);

  for (std::size_t d = 0; d < nd; ++d) {
    gen::Terms t;
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t p = 0; p < nt; ++p) t.emplace_back(x[(d * ns + s) * nt + p], 1.0);
    b.row("stock_" + gen::label("D", d), t, RowSense::LE, stock(d));
  }
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t p = 0; p < nt; ++p) {
      gen::Terms t;
      for (std::size_t s = 0; s < ns; ++s) t.emplace_back(x[(d * ns + s) * nt + p], 1.0);
      b.row("fleet_" + gen::label("D", d) + "_" + gen::label("T", p), t, RowSense::LE, fleet(d));
    }
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t p = 0; p < nt; ++p) {
      gen::Terms t{{u[s * nt + p], 1.0}};
      for (std::size_t d = 0; d < nd; ++d) t.emplace_back(x[(d * ns + s) * nt + p], 1.0);
      b.row("need_" + gen::label("S", s) + "_" + gen::label("T", p), t, RowSense::EQ, need(s, p));
    }
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t p = 0; p < nt; ++p) {
        const double big = std::min({stock(d), fleet(d), need(s, p)});
        b.row("route_" + gen::label("D", d) + "_" + gen::label("S", s) + "_" + gen::label("T", p),
              {{x[(d * ns + s) * nt + p], 1.0}, {z[d * ns + s], -big}}, RowSense::LE, 0.0);
      }
  return b.finish();
}

inline CategoryDef disaster_response_def() {
  CategoryDef d{Category::DisasterResponse};
  d.ranges = {{"num_depots", 1, 6, 2, 3}, {"num_shelters", 1, 10, 3, 5}, {"num_periods", 1, 8, 2, 4}};
  d.schema.dims = {"num_depots", "num_shelters", "num_periods"};
  d.schema.fields = {
      {"stock", {"num_depots"}, ElementType::Int, "relief units held at each depot for the whole horizon"},
      {"vehicle_capacity", {"num_depots"}, ElementType::Int, "units each depot can dispatch per period"},
      {"demand", {"num_shelters", "num_periods"}, ElementType::Int, "units needed per shelter and period"},
      {"unit_cost", {"num_depots", "num_shelters"}, ElementType::Float, "cost per unit moved"},
      {"security_cost", {"num_depots", "num_shelters"}, ElementType::Float, "one-off cost to secure a route"},
      {"shortage_penalty", {"num_shelters"}, ElementType::Float, "penalty per unit of unmet demand"},
  };
  d.sample = sample_disaster_response;
  d.formulate = formulate_disaster_response;
  return d;
}

}  // namespace optbind
