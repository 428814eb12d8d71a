#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "optbind/formulas.hpp"
#include "optbind/generators/category.hpp"

namespace optbind {

namespace detail {

inline void sample_sites(WorldState& w, Rng& rng, std::size_t nf, std::size_t nc) {
  std::vector<double> fx(nf), fy(nf), cx(nc), cy(nc);
  for (std::size_t i = 0; i < nf; ++i) {
    fx[i] = gen::draw2(rng, 0, 100);
    fy[i] = gen::draw2(rng, 0, 100);
  }
  for (std::size_t j = 0; j < nc; ++j) {
    cx[j] = gen::draw2(rng, 0, 100);
    cy[j] = gen::draw2(rng, 0, 100);
  }
  w.params["facility_x"] = Array::vector(fx);
  w.params["facility_y"] = Array::vector(fy);
  w.params["customer_x"] = Array::vector(cx);
  w.params["customer_y"] = Array::vector(cy);
  w.params["cost_per_unit_distance"] = Array::scalar(gen::draw2(rng, 0.5, 2.0));
}

// Unit shipping cost from coordinates; the documents give only the sites.
inline std::vector<std::vector<double>> site_costs(const WorldState& w) {
  const std::size_t nf = w.count("num_facilities");
  const std::size_t nc = w.count("num_customers");
  std::vector<Coord> f(nf), c(nc);
  for (std::size_t i = 0; i < nf; ++i) f[i] = {w.param("facility_x")(i), w.param("facility_y")(i)};
  for (std::size_t j = 0; j < nc; ++j) c[j] = {w.param("customer_x")(j), w.param("customer_y")(j)};
  return derive_euclidean_costs(f, c, w.param("cost_per_unit_distance").value());
}

inline std::vector<FieldSpec> site_fields() {
  return {
      {"facility_x", {"num_facilities"}, ElementType::Float, "site easting"},
      {"facility_y", {"num_facilities"}, ElementType::Float, "site northing"},
      {"customer_x", {"num_customers"}, ElementType::Float, "customer easting"},
      {"customer_y", {"num_customers"}, ElementType::Float, "customer northing"},
      {"cost_per_unit_distance", {}, ElementType::Float, "shipping cost per unit per unit of straight-line distance"},
      {"fixed_cost", {"num_facilities"}, ElementType::Float, "cost of opening a site"},
      {"capacity", {"num_facilities"}, ElementType::Int, "units a site can serve"},
      {"demand", {"num_customers"}, ElementType::Int, "units each customer needs"},
  };
}

}  // namespace detail

inline void sample_facility_location(WorldState& w, Rng& rng) {
  const std::size_t nf = w.count("num_facilities");
  const std::size_t nc = w.count("num_customers");
  detail::sample_sites(w, rng, nf, nc);
  std::vector<double> demand(nc), cap(nf), fixed(nf);
  for (auto& v : demand) v = static_cast<double>(rng.integer(10, 100));
  const double total = std::accumulate(demand.begin(), demand.end(), 0.0);
  std::vector<double> share(nf);
  for (auto& v : share) v = rng.uniform(0.5, 1.5);
  const double sum_share = std::accumulate(share.begin(), share.end(), 0.0);
  // Capacities cover total demand 1.2 to 1.6 times over.
  const double scale = rng.uniform(1.2, 1.6);
  for (std::size_t i = 0; i < nf; ++i) cap[i] = std::ceil(total * scale * share[i] / sum_share);
  for (auto& v : fixed) v = gen::draw2(rng, 200, 1500);
  w.params["demand"] = Array::vector(demand);
  w.params["capacity"] = Array::vector(cap);
  w.params["fixed_cost"] = Array::vector(fixed);
  w.meta["ranges"] = {{"coordinates", "U[0,100]^2"}, {"demand", "U{10..100}"}, {"fixed_cost", "U[200,1500]"},
                      {"cost_per_unit_distance", "U[0.5,2]"}, {"capacity", "total demand * U[1.2,1.6], split"}};
}

inline Formulation formulate_facility_location(const WorldState& w) {
  const std::size_t nf = w.count("num_facilities");
  const std::size_t nc = w.count("num_customers");
  const auto cost = detail::site_costs(w);
  const auto& demand = w.param("demand");
  const auto& cap = w.param("capacity");
  const auto& fixed = w.param("fixed_cost");
  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::size_t> y(nf), x(nf * nc);
  for (std::size_t i = 0; i < nf; ++i)
    y[i] = b.var("open_" + gen::label("F", i), fixed(i), 0.0, 1.0, VarType::Binary);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      x[i * nc + j] = b.var("ship_" + gen::label("F", i) + "_" + gen::label("C", j), cost[i][j], 0.0, kInf);
  for (std::size_t j = 0; j < nc; ++j) {
    gen::Terms t;
    for (std::size_t i = 0; i < nf; ++i) t.emplace_back(x[i * nc + j], 1.0);
    b.row("serve_" + gen::label("C", j), t, RowSense::EQ, demand(j));
  }
  for (std::size_t i = 0; i < nf; ++i) {
    gen::Terms t{{y[i], -cap(i)}};
    for (std::size_t j = 0; j < nc; ++j) t.emplace_back(x[i * nc + j], 1.0);
    b.row("capacity_" + gen::label("F", i), t, RowSense::LE, 0.0);
  }
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      b.row("link_" + gen::label("F", i) + "_" + gen::label("C", j),
            {{x[i * nc + j], 1.0}, {y[i], -std::min(demand(j), cap(i))}}, RowSense::LE, 0.0);
  return b.finish();
}

inline CategoryDef facility_location_def() {
  CategoryDef d{Category::FacilityLocation};
  d.ranges = {{"num_facilities", 1, 12, 2, 6}, {"num_customers", 1, 40, 4, 15}};
  d.schema.dims = {"num_facilities", "num_customers"};
  d.schema.fields = detail::site_fields();
  d.sample = sample_facility_location;
  d.formulate = formulate_facility_location;
  return d;
}

// Facility location with single-sourcing assignments, a cap on how many
// customers each site may serve, and sites that must stay open.
inline void sample_modified_facility_location(WorldState& w, Rng& rng) {
  const std::size_t nf = w.count("num_facilities");
  const std::size_t nc = w.count("num_customers");
  detail::sample_sites(w, rng, nf, nc);
  std::vector<double> demand(nc), cap(nf), fixed(nf), max_cust(nf), must(nf, 0.0);
  for (auto& v : demand) v = static_cast<double>(rng.integer(10, 100));
  for (auto& v : fixed) v = gen::draw2(rng, 200, 1500);
  // Anchor plan: open a random subset, force some of it open, and assign
  // every customer to one open site.
  const auto perm = rng.permutation(nf);
  const std::size_t n_open = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(nf)));
  std::vector<std::size_t> open(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_open));
  const std::size_t n_forced = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(n_open)));
  for (std::size_t k = 0; k < n_forced; ++k) must[open[k]] = 1.0;
  std::vector<double> load(nf, 0.0), count(nf, 0.0);
  for (std::size_t j = 0; j < nc; ++j) {
    const std::size_t i = open[rng.index(n_open)];
    load[i] += demand[j];
    count[i] += 1.0;
  }
  const double avg_load = std::accumulate(demand.begin(), demand.end(), 0.0) / static_cast<double>(n_open);
  const double avg_count = static_cast<double>(nc) / static_cast<double>(n_open);
  for (std::size_t i = 0; i < nf; ++i) {
    const double base_load = load[i] > 0 ? load[i] : avg_load;
    const double base_count = count[i] > 0 ? count[i] : std::ceil(avg_count);
    cap[i] = std::ceil(base_load * rng.uniform(1.0, 1.3));
    max_cust[i] = base_count + static_cast<double>(rng.integer(0, 1));
  }
  w.params["demand"] = Array::vector(demand);
  w.params["capacity"] = Array::vector(cap);
  w.params["fixed_cost"] = Array::vector(fixed);
  w.params["max_customers"] = Array::vector(max_cust);
  w.params["must_open"] = Array::vector(must);
  w.meta["ranges"] = {{"coordinates", "U[0,100]^2"}, {"demand", "U{10..100}"}, {"fixed_cost", "U[200,1500]"},
                      {"cost_per_unit_distance", "U[0.5,2]"}, {"capacity", "anchor load * U[1,1.3]"}};
}

inline Formulation formulate_modified_facility_location(const WorldState& w) {
  const std::size_t nf = w.count("num_facilities");
  const std::size_t nc = w.count("num_customers");
  const auto cost = detail::site_costs(w);
  const auto& demand = w.param("demand");
  const auto& cap = w.param("capacity");
  const auto& fixed = w.param("fixed_cost");
  const auto& max_cust = w.param("max_customers");
  const auto& must = w.param("must_open");
  gen::FormulationBuilder b(Sense::Min);
  std::vector<std::size_t> y(nf), a(nf * nc), x(nf * nc);
  for (std::size_t i = 0; i < nf; ++i)
    y[i] = b.var("open_" + gen::label("F", i), fixed(i), 0.0, 1.0, VarType::Binary);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      a[i * nc + j] = b.var("assign_" + gen::label("F", i) + "_" + gen::label("C", j), 0.0, 0.0, 1.0, VarType::Binary);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      x[i * nc + j] = b.var("ship_" + gen::label("F", i) + "_" + gen::label("C", j), cost[i][j], 0.0, kInf);
  for (std::size_t j = 0; j < nc; ++j) {
    gen::Terms t, one;
    for (std::size_t i = 0; i < nf; ++i) {
      t.emplace_back(x[i * nc + j], 1.0);
      one.emplace_back(a[i * nc + j], 1.0);
    }
    b.row("serve_" + gen::label("C", j), t, RowSense::EQ, demand(j));
    b.row("single_source_" + gen::label("C", j), one, RowSense::EQ, 1.0);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    gen::Terms t{{y[i], -cap(i)}};
    for (std::size_t j = 0; j < nc; ++j) t.emplace_back(x[i * nc + j], 1.0);
    b.row("capacity_" + gen::label("F", i), t, RowSense::LE, 0.0);
  }
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = 0; j < nc; ++j) {
      b.row("link_" + gen::label("F", i) + "_" + gen::label("C", j), {{x[i * nc + j], 1.0}, {a[i * nc + j], -demand(j)}},
            RowSense::LE, 0.0);
      b.row("open_link_" + gen::label("F", i) + "_" + gen::label("C", j), {{a[i * nc + j], 1.0}, {y[i], -1.0}},
            RowSense::LE, 0.0);
    }
  for (std::size_t i = 0; i < nf; ++i) {
    gen::Terms t;
    for (std::size_t j = 0; j < nc; ++j) t.emplace_back(a[i * nc + j], 1.0);
    b.row("customer_cap_" + gen::label("F", i), t, RowSense::LE, max_cust(i));
  }
  for (std::size_t i = 0; i < nf; ++i)
    if (must(i) != 0.0) b.row("must_open_" + gen::label("F", i), {{y[i], 1.0}}, RowSense::GE, 1.0);
  return b.finish();
}

inline CategoryDef modified_facility_location_def() {
  CategoryDef d{Category::ModifiedFacilityLocation};
  d.ranges = {{"num_facilities", 1, 8, 2, 4}, {"num_customers", 1, 20, 4, 8}};
  d.schema.dims = {"num_facilities", "num_customers"};
  d.schema.fields = detail::site_fields();
  d.schema.fields.push_back({"max_customers", {"num_facilities"}, ElementType::Int, "most customers a site may serve"});
  d.schema.fields.push_back({"must_open", {"num_facilities"}, ElementType::Int, "one when the site must stay open"});
  d.sample = sample_modified_facility_location;
  d.formulate = formulate_modified_facility_location;
  return d;
}

}  // namespace optbind
