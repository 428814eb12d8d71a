#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "optbind/formulas.hpp"
#include "optbind/generators/category.hpp"

namespace optbind {

// Routes for the anchor plan are drawn first; capacity and time windows are
// then placed around that plan so it stays feasible.
inline void sample_vrptw(WorldState& w, Rng& rng) {
  const std::size_t n = w.count("num_customers");
  const std::size_t k = w.count("num_vehicles");
  w.dims["num_nodes"] = static_cast<std::int64_t>(n + 1);
  std::vector<Coord> pts(n + 1);
  for (auto& p : pts) p = {gen::draw2(rng, 0, 100), gen::draw2(rng, 0, 100)};
  const auto dist = derive_euclidean_costs(pts, pts, 1.0);
  std::vector<double> travel((n + 1) * (n + 1));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j) travel[i * (n + 1) + j] = round_to(dist[i][j]);

  std::vector<double> demand(n), service(n), open(n), close(n);
  for (auto& v : demand) v = static_cast<double>(rng.integer(5, 30));
  for (auto& v : service) v = gen::draw2(rng, 1, 10);

  // Anchor: shuffle customers and cut into k non-empty routes.
  auto order = rng.permutation(n);
  std::vector<std::size_t> cuts;
  {
    auto pos = rng.permutation(n - 1);
    for (std::size_t r = 0; r + 1 < k; ++r) cuts.push_back(pos[r] + 1);
    std::sort(cuts.begin(), cuts.end());
  }
  cuts.push_back(n);
  double max_load = 0.0;
  std::size_t begin = 0;
  for (std::size_t end : cuts) {
    double load = 0.0, t = 0.0;
    std::size_t prev = 0;
    for (std::size_t q = begin; q < end; ++q) {
      const std::size_t c = order[q] + 1;
      t += travel[prev * (n + 1) + c];
      open[c - 1] = gen::floor2(std::max(0.0, t - rng.uniform(0, 30)));
      close[c - 1] = gen::ceil2(t + rng.uniform(5, 30));
      t += service[c - 1];
      load += demand[c - 1];
      prev = c;
    }
    max_load = std::max(max_load, load);
    begin = end;
  }
  const double capacity = max_load + static_cast<double>(rng.integer(0, 10));

  w.params["travel_times"] = Array::matrix(n + 1, n + 1, travel);
  w.params["demands"] = Array::vector(demand);
  w.params["service_times"] = Array::vector(service);
  w.params["window_open"] = Array::vector(open);
  w.params["window_close"] = Array::vector(close);
  w.params["vehicle_capacity"] = Array::scalar(capacity);
  std::vector<double> xy;
  for (auto& p : pts) {
    xy.push_back(p.first);
    xy.push_back(p.second);
  }
  w.params["coordinates"] = Array::matrix(n + 1, 2, xy);
  w.meta["ranges"] = {{"coordinates", "U[0,100]^2"}, {"demands", "U{5..30}"}, {"service_times", "U[1,10]"}};
}

// Miller-Tucker-Zemlin formulation with arrival-time and load variables.
// Node 0 is the depot.
inline Formulation formulate_vrptw(const WorldState& w) {
  const std::size_t n = w.count("num_customers");
  const double k = static_cast<double>(w.dim("num_vehicles"));
  if (w.count("num_nodes") != n + 1) throw data_error("num_nodes must equal num_customers + 1");
  const auto& d = w.param("travel_times");
  const auto& q = w.param("demands");
  const auto& s = w.param("service_times");
  const auto& e = w.param("window_open");
  const auto& l = w.param("window_close");
  const double cap = w.param("vehicle_capacity").value();

  gen::FormulationBuilder b(Sense::Min);
  const std::size_t nn = n + 1;
  std::vector<std::size_t> x(nn * nn, static_cast<std::size_t>(-1));
  auto node = [](std::size_t i) { return i == 0 ? std::string("depot") : gen::label("C", i - 1); };
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      if (i != j) x[i * nn + j] = b.var("x_" + node(i) + "_" + node(j), d(i, j), 0.0, 1.0, VarType::Binary);
  std::vector<std::size_t> t(n), u(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = b.var("t_" + node(i + 1), 0.0, e(i), l(i));
  for (std::size_t i = 0; i < n; ++i) u[i] = b.var("u_" + node(i + 1), 0.0, q(i), cap);

  for (std::size_t i = 1; i < nn; ++i) {
    gen::Terms out, in;
    for (std::size_t j = 0; j < nn; ++j)
      if (j != i) {
        out.emplace_back(x[i * nn + j], 1.0);
        in.emplace_back(x[j * nn + i], 1.0);
      }
    b.row("leave_" + node(i), out, RowSense::EQ, 1.0);
    b.row("enter_" + node(i), in, RowSense::EQ, 1.0);
  }
  {
    gen::Terms fleet, balance;
    for (std::size_t j = 1; j < nn; ++j) {
      fleet.emplace_back(x[j], 1.0);
      balance.emplace_back(x[j], 1.0);
      balance.emplace_back(x[j * nn], -1.0);
    }
    b.row("fleet", fleet, RowSense::LE, k);
    b.row("depot_balance", balance, RowSense::EQ, 0.0);
  }
  for (std::size_t j = 1; j < nn; ++j)
    b.row("first_arrival_" + node(j), {{t[j - 1], 1.0}, {x[j], -d(0, j)}}, RowSense::GE, 0.0);
  for (std::size_t i = 1; i < nn; ++i)
    for (std::size_t j = 1; j < nn; ++j) {
      if (i == j) continue;
      const double big = std::max(0.0, l(i - 1) + s(i - 1) + d(i, j) - e(j - 1));
      b.row("time_" + node(i) + "_" + node(j), {{t[j - 1], 1.0}, {t[i - 1], -1.0}, {x[i * nn + j], -big}},
            RowSense::GE, s(i - 1) + d(i, j) - big);
      b.row("load_" + node(i) + "_" + node(j), {{u[j - 1], 1.0}, {u[i - 1], -1.0}, {x[i * nn + j], -cap}},
            RowSense::GE, q(j - 1) - cap);
    }
  return b.finish();
}

inline CategoryDef vrptw_def() {
  CategoryDef d{Category::Vrptw};
  d.ranges = {{"num_customers", 2, 10, 3, 6}, {"num_vehicles", 1, 4, 1, 2}};
  d.schema.dims = {"num_customers", "num_vehicles", "num_nodes"};
  d.schema.fields = {
      {"travel_times", {"num_nodes", "num_nodes"}, ElementType::Float, "travel time between nodes, the first node is the depot"},
      {"demands", {"num_customers"}, ElementType::Int, "units delivered to each customer"},
      {"service_times", {"num_customers"}, ElementType::Float, "time spent at each customer"},
      {"window_open", {"num_customers"}, ElementType::Float, "earliest service start"},
      {"window_close", {"num_customers"}, ElementType::Float, "latest service start"},
      {"vehicle_capacity", {}, ElementType::Int, "units per vehicle"},
  };
  d.sample = sample_vrptw;
  d.formulate = formulate_vrptw;
  d.check_dims = [](const Dims& dims) {
    if (dims.at("num_vehicles") > dims.at("num_customers"))
      throw usage_error("vrptw needs num_vehicles <= num_customers");
  };
  return d;
}

}  // namespace optbind
