#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "optbind/generators/world.hpp"

namespace optbind {

struct DimRange {
  std::string name;
  std::int64_t min = 1;       // hard limits accepted by generate_instance
  std::int64_t max = 1;
  std::int64_t desk_min = 1;  // range sampled for the small tier
  std::int64_t desk_max = 1;
};

struct CategoryDef {
  Category category;
  std::vector<DimRange> ranges;
  Dims large;  // dims of the large tier; empty when the category has none
  BindSchema schema;
  // Fills params, meta and any derived dims of a world whose sizing dims are set.
  std::function<void(WorldState&, Rng&)> sample;
  // Builds the model from schema fields only, so a world read back from a
  // data file produces the same model.
  std::function<Formulation(const WorldState&)> formulate;
  // Extra cross-dimension checks; throws usage_error.
  std::function<void(const Dims&)> check_dims = [](const Dims&) {};
};

}  // namespace optbind
