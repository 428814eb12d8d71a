#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "optbind/generators/category.hpp"

namespace optbind {

// Anchor construction: a point x_anchor is drawn first and every right-hand
// side is set to (A x_anchor)_i + s_i, so x_anchor is feasible by design.
// Each resource row owns one product that uses no other resource; with
// positive profits that row is tight at every optimum, and every product has
// a positive minimum level, so each right-hand side and each profit moves z*.
inline void sample_resource_allocation(WorldState& w, Rng& rng) {
  const std::size_t n = w.count("num_products");
  const std::size_t m = w.count("num_resources");

  std::vector<double> usage(m * n, 0.0);
  std::vector<bool> mask(m * n, false);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      usage[i * n + j] = gen::draw2(rng, 0.1, 10.0);
      mask[i * n + j] = rng.bernoulli(0.6);
    }
  const auto perm = rng.permutation(n);
  std::vector<bool> is_private(n, false);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = perm[i];
    is_private[k] = true;
    for (std::size_t r = 0; r < m; ++r) mask[r * n + k] = (r == i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) any = any || mask[i * n + j];
    if (!any) mask[rng.index(m) * n + j] = true;
  }
  for (std::size_t k = 0; k < m * n; ++k)
    if (!mask[k]) usage[k] = 0.0;

  std::vector<double> anchor(n), is_int(n, 0.0), lo(n), hi(n, kInf), profit(n);
  for (std::size_t j = 0; j < n; ++j) anchor[j] = gen::draw2(rng, 1.0, 10.0);
  for (std::size_t j = 0; j < n; ++j)
    if (!is_private[j] && rng.bernoulli(0.4)) {
      is_int[j] = 1.0;
      anchor[j] = std::round(anchor[j]);
    }
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = round_to(anchor[j] * rng.uniform(0.4, 0.8));
    if (is_int[j] != 0.0) {
      lo[j] = std::max(1.0, std::floor(lo[j]));
      hi[j] = anchor[j] + static_cast<double>(rng.integer(1, 5));
    }
  }
  std::vector<double> slack(m), avail(m);
  for (std::size_t i = 0; i < m; ++i) {
    slack[i] = gen::draw2(rng, 0.5, 20.0);
    double act = 0.0;
    for (std::size_t j = 0; j < n; ++j) act += usage[i * n + j] * anchor[j];
    avail[i] = gen::ceil2(act + slack[i]);
  }
  for (std::size_t j = 0; j < n; ++j) profit[j] = gen::draw2(rng, 1.0, 10.0);

  w.params["profit"] = Array::vector(profit);
  w.params["usage"] = Array::matrix(m, n, usage);
  w.params["availability"] = Array::vector(avail);
  w.params["min_level"] = Array::vector(lo);
  w.params["max_level"] = Array::vector(hi);
  w.params["integer_flag"] = Array::vector(is_int);
  w.params["x_anchor"] = Array::vector(anchor);
  w.params["slack"] = Array::vector(slack);
  w.meta["ranges"] = {{"usage", "U[0.1,10], density 0.6"}, {"profit", "U[1,10]"},
                      {"x_anchor", "U[1,10]"},           {"slack", "U[0.5,20]"},
                      {"min_level", "x_anchor * U[0.4,0.8]"}};
}

inline Formulation formulate_resource_allocation(const WorldState& w) {
  const std::size_t n = w.count("num_products");
  const std::size_t m = w.count("num_resources");
  const auto& profit = w.param("profit");
  const auto& usage = w.param("usage");
  const auto& avail = w.param("availability");
  const auto& lo = w.param("min_level");
  const auto& hi = w.param("max_level");
  const auto& flag = w.param("integer_flag");
  gen::FormulationBuilder b(Sense::Max);
  for (std::size_t j = 0; j < n; ++j)
    b.var(gen::label("x", j), profit(j), lo(j), hi(j), flag(j) != 0.0 ? VarType::Integer : VarType::Continuous);
  for (std::size_t i = 0; i < m; ++i) {
    gen::Terms t;
    for (std::size_t j = 0; j < n; ++j)
      if (usage(i, j) != 0.0) t.emplace_back(j, usage(i, j));
    b.row(gen::label("resource", i), t, RowSense::LE, avail(i));
  }
  return b.finish();
}

inline CategoryDef resource_allocation_def() {
  CategoryDef d{Category::ResourceAllocation};
  d.ranges = {{"num_products", 2, 20, 2, 20}, {"num_resources", 1, 20, 1, 20}};
  d.schema.dims = {"num_products", "num_resources"};
  d.schema.fields = {
      {"profit", {"num_products"}, ElementType::Float, "contribution per unit"},
      {"usage", {"num_resources", "num_products"}, ElementType::Float, "resource units consumed per unit made"},
      {"availability", {"num_resources"}, ElementType::Float, "resource units available"},
      {"min_level", {"num_products"}, ElementType::Float, "committed minimum output"},
      {"max_level", {"num_products"}, ElementType::Float, "maximum output, null when unlimited"},
      {"integer_flag", {"num_products"}, ElementType::Int, "one when made in whole units, otherwise zero"},
  };
  d.sample = sample_resource_allocation;
  d.formulate = formulate_resource_allocation;
  d.check_dims = [](const Dims& dims) {
    if (dims.at("num_resources") > dims.at("num_products"))
      throw usage_error("resource allocation needs num_resources <= num_products");
  };
  return d;
}

}  // namespace optbind
