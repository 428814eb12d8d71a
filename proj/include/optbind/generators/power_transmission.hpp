#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "optbind/formulas.hpp"
#include "optbind/generators/category.hpp"

namespace optbind {

// Existing lines form a random spanning tree rated for the whole system load,
// so any dispatch that covers total demand can be routed. Candidate lines add
// cycles that may cut losses for a one-off build cost.
inline void sample_power_transmission(WorldState& w, Rng& rng) {
  const std::size_t nb = w.count("num_buses");
  const std::size_t ng = w.count("num_generators");
  const std::size_t ncand = w.count("num_candidates");
  const std::size_t nl = nb - 1 + ncand;
  w.dims["num_lines"] = static_cast<std::int64_t>(nl);

  std::vector<double> demand(nb);
  for (auto& v : demand) v = static_cast<double>(rng.integer(10, 100));
  const double total = std::accumulate(demand.begin(), demand.end(), 0.0);

  std::vector<double> gen_bus(ng), gen_cost(ng), gen_cap(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    gen_bus[g] = static_cast<double>(rng.index(nb));
    gen_cost[g] = gen::draw2(rng, 10, 40);
  }
  std::vector<double> share(ng);
  for (auto& v : share) v = rng.uniform(0.5, 1.5);
  const double sum_share = std::accumulate(share.begin(), share.end(), 0.0);
  const double margin = rng.uniform(1.2, 1.6);
  for (std::size_t g = 0; g < ng; ++g) gen_cap[g] = std::ceil(total * margin * share[g] / sum_share);

  const double voltages[] = {69, 115, 138, 230};
  std::vector<double> from, to, cap, res, kv, cand, build;
  const auto order = rng.permutation(nb);
  for (std::size_t k = 1; k < nb; ++k) {
    from.push_back(static_cast<double>(order[rng.index(k)]));
    to.push_back(static_cast<double>(order[k]));
    cap.push_back(std::ceil(total * rng.uniform(1.0, 1.2)));
    cand.push_back(0.0);
    build.push_back(0.0);
  }
  for (std::size_t k = 0; k < ncand; ++k) {
    const std::size_t a = rng.index(nb);
    std::size_t b = rng.index(nb - 1);
    if (b >= a) ++b;
    from.push_back(static_cast<double>(a));
    to.push_back(static_cast<double>(b));
    cap.push_back(std::ceil(total * rng.uniform(0.3, 0.8)));
    cand.push_back(1.0);
    build.push_back(gen::draw2(rng, 2, 20));
  }
  for (std::size_t l = 0; l < nl; ++l) {
    res.push_back(gen::draw2(rng, 0.1, 2.0));
    kv.push_back(voltages[rng.index(4)]);
  }
  w.params["demand"] = Array::vector(demand);
  w.params["gen_bus"] = Array::vector(gen_bus);
  w.params["gen_cost"] = Array::vector(gen_cost);
  w.params["gen_capacity"] = Array::vector(gen_cap);
  w.params["line_from"] = Array::vector(from);
  w.params["line_to"] = Array::vector(to);
  w.params["line_capacity"] = Array::vector(cap);
  w.params["resistance"] = Array::vector(res);
  w.params["voltage_kv"] = Array::vector(kv);
  w.params["is_candidate"] = Array::vector(cand);
  w.params["build_cost"] = Array::vector(build);
  w.params["loss_cost_rate"] = Array::scalar(gen::draw2(rng, 0.5, 5.0));
  w.meta["ranges"] = {{"demand", "U{10..100}"},     {"gen_cost", "U[10,40]"},
                      {"resistance", "U[0.1,2]"},   {"voltage_kv", "one of 69, 115, 138, 230"},
                      {"loss_cost_rate", "U[0.5,5]"}, {"build_cost", "U[2,20]"}};
}

// Transport model with flows f on lines in either direction and a quadratic
// loss charge rate * R / V^2 * f^2 per line.
inline Formulation formulate_power_transmission(const WorldState& w) {
  const std::size_t nb = w.count("num_buses");
  const std::size_t ng = w.count("num_generators");
  const std::size_t nl = w.count("num_lines");
  const auto& demand = w.param("demand");
  const auto& gen_bus = w.param("gen_bus");
  const auto& gen_cost = w.param("gen_cost");
  const auto& gen_cap = w.param("gen_capacity");
  const auto& from = w.param("line_from");
  const auto& to = w.param("line_to");
  const auto& cap = w.param("line_capacity");
  const auto& res = w.param("resistance");
  const auto& kv = w.param("voltage_kv");
  const auto& cand = w.param("is_candidate");
  const auto& build = w.param("build_cost");
  const double rate = w.param("loss_cost_rate").value();
  auto bus_index = [&](double v, const char* what) {
    if (v < 0 || v >= static_cast<double>(nb) || v != std::floor(v))
      throw data_error(std::string(what) + " references an unknown bus");
    return static_cast<std::size_t>(v);
  };

  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::size_t> g(ng), f(nl);
  for (std::size_t k = 0; k < ng; ++k) g[k] = b.var(gen::label("gen_", k), gen_cost(k), 0.0, gen_cap(k));
  for (std::size_t l = 0; l < nl; ++l) {
    f[l] = b.var(gen::label("flow_L", l), 0.0, -cap(l), cap(l));
    b.quadratic(f[l], power_loss_coefficient(rate, res(l), kv(l)));
  }
  std::vector<std::size_t> z(nl, static_cast<std::size_t>(-1));
  for (std::size_t l = 0; l < nl; ++l)
    if (cand(l) != 0.0) z[l] = b.var(gen::label("build_L", l), build(l), 0.0, 1.0, VarType::Binary);

  std::vector<gen::Terms> balance(nb);
  for (std::size_t k = 0; k < ng; ++k) balance[bus_index(gen_bus(k), "gen_bus")].emplace_back(g[k], 1.0);
  for (std::size_t l = 0; l < nl; ++l) {
    balance[bus_index(from(l), "line_from")].emplace_back(f[l], -1.0);
    balance[bus_index(to(l), "line_to")].emplace_back(f[l], 1.0);
  }
  for (std::size_t n = 0; n < nb; ++n) b.row(gen::label("balance_B", n), balance[n], RowSense::EQ, demand(n));
  for (std::size_t l = 0; l < nl; ++l) {
    if (cand(l) == 0.0) continue;
    b.row(gen::label("forward_L", l), {{f[l], 1.0}, {z[l], -cap(l)}}, RowSense::LE, 0.0);
    b.row(gen::label("reverse_L", l), {{f[l], -1.0}, {z[l], -cap(l)}}, RowSense::LE, 0.0);
  }
  return b.finish();
}

inline CategoryDef power_transmission_def() {
  CategoryDef d{Category::PowerTransmission};
  d.ranges = {{"num_buses", 2, 12, 3, 6}, {"num_generators", 1, 6, 2, 3}, {"num_candidates", 0, 8, 1, 4}};
  d.schema.dims = {"num_buses", "num_generators", "num_lines"};
  d.schema.fields = {
      {"demand", {"num_buses"}, ElementType::Int, "load at each bus in megawatts"},
      {"gen_bus", {"num_generators"}, ElementType::Int, "bus (zero-based) of each generator"},
      {"gen_cost", {"num_generators"}, ElementType::Float, "cost per megawatt generated"},
      {"gen_capacity", {"num_generators"}, ElementType::Int, "maximum output in megawatts"},
      {"line_from", {"num_lines"}, ElementType::Int, "sending bus (zero-based); flow may run either way"},
      {"line_to", {"num_lines"}, ElementType::Int, "receiving bus (zero-based)"},
      {"line_capacity", {"num_lines"}, ElementType::Int, "thermal limit in megawatts"},
      {"resistance", {"num_lines"}, ElementType::Float, "line resistance in ohms"},
      {"voltage_kv", {"num_lines"}, ElementType::Int, "line voltage in kilovolts"},
      {"is_candidate", {"num_lines"}, ElementType::Int, "one when the line must be built before use"},
      {"build_cost", {"num_lines"}, ElementType::Float, "one-off build cost, zero for existing lines"},
      {"loss_cost_rate", {}, ElementType::Float, "cost per unit of resistive loss"},
  };
  d.sample = sample_power_transmission;
  d.formulate = formulate_power_transmission;
  return d;
}

}  // namespace optbind
