#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "optbind/formulas.hpp"
#include "optbind/generators/category.hpp"
#include "optbind/generators/disaster_response.hpp"
#include "optbind/generators/facility_location.hpp"
#include "optbind/generators/jssp.hpp"
#include "optbind/generators/multi_objective_transportation.hpp"
#include "optbind/generators/power_transmission.hpp"
#include "optbind/generators/queuing_staffing.hpp"
#include "optbind/generators/rcpsp.hpp"
#include "optbind/generators/resource_allocation.hpp"
#include "optbind/generators/stochastic_transportation.hpp"
#include "optbind/generators/transportation.hpp"
#include "optbind/generators/vrptw.hpp"
#include "optbind/generators/world.hpp"
#include "optbind/solver.hpp"

namespace optbind {

inline const CategoryDef& category_def(Category c) {
  static const std::vector<CategoryDef> defs = [] {
    std::vector<CategoryDef> v(kAllCategories.size());
    auto put = [&](CategoryDef d) { v[static_cast<std::size_t>(d.category)] = std::move(d); };
    put(resource_allocation_def());
    put(transportation_def());
    put(disaster_response_def());
    put(jssp_def());
    put(vrptw_def());
    put(rcpsp_def());
    put(facility_location_def());
    put(power_transmission_def());
    put(queuing_staffing_def());
    put(stochastic_transportation_def());
    put(multi_objective_transportation_def());
    put(modified_facility_location_def());
    return v;
  }();
  return defs.at(static_cast<std::size_t>(c));
}

inline void check_dims(Category c, const Dims& dims) {
  const auto& d = category_def(c);
  for (const auto& r : d.ranges) gen::require_dim(dims, r.name, r.min, r.max);
  for (const auto& [k, v] : dims) {
    bool known = false;
    for (const auto& r : d.ranges) known = known || r.name == k;
    if (!known) throw usage_error(std::string("dimension '") + k + "' is not used by " + to_string(c));
  }
  d.check_dims(dims);
}

// Small tier: each dim drawn log-uniformly over its desk range, redrawn until
// the cross-dimension checks pass. Large tier: the fixed large dims.
inline Dims sample_dims(Category c, Tier tier, std::uint64_t seed) {
  const auto& d = category_def(c);
  if (tier == Tier::Large) {
    if (d.large.empty()) throw usage_error(std::string(to_string(c)) + " has no large tier");
    return d.large;
  }
  Rng rng(mix_seed(seed, fnv1a(std::string("dims/") + to_string(c))));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Dims dims;
    for (const auto& r : d.ranges)
      dims[r.name] = r.desk_min <= 0 ? rng.integer(r.desk_min, r.desk_max) : rng.log_uniform_int(r.desk_min, r.desk_max);
    try {
      d.check_dims(dims);
      return dims;
    } catch (const Error&) {
    }
  }
  throw internal_error("could not draw consistent dims");
}

struct ProblemInstance {
  WorldState world;
  StandardFormModel model;
  GroundTruth truth;
  Tier tier = Tier::Small;
  std::vector<std::string> var_names;
  std::vector<std::string> row_names;
  std::uint64_t requested_seed = 0;
  int attempts = 1;
};

inline constexpr int kMaxRejections = 25;

// Draws a world, builds its model and keeps it only when the solver proves an
// optimum whose point passes evaluate_point. Rejected draws retry with seed+k.
inline ProblemInstance generate_instance(Category c, const Dims& dims, std::uint64_t seed, const SolverConfig& cfg = {},
                                         Tier tier = Tier::Small) {
  check_dims(c, dims);
  const auto& def = category_def(c);
  std::vector<std::string> reasons;
  for (int k = 0; k < kMaxRejections; ++k) {
    WorldState w;
    w.category = c;
    w.seed = seed + static_cast<std::uint64_t>(k);
    w.dims = dims;
    Rng rng(gen::world_seed(c, w.seed, dims));
    def.sample(w, rng);
    check_against_schema(w, def.schema);
    auto f = def.formulate(w);
    const auto issues = validate_model(f.model);
    if (!issues.empty()) {
      reasons.push_back("invalid model: " + issues.front().message);
      continue;
    }
    const auto r = solve(f.model, cfg);
    if (!r.optimal()) {
      reasons.push_back(std::string("solver status ") + to_string(r.status));
      continue;
    }
    if (!evaluate_point(f.model, *r.point, FeasibilityTolerance{cfg.feas_tol, 0.0, cfg.int_tol}).feasible) {
      reasons.push_back("optimal point failed the feasibility check");
      continue;
    }
    ProblemInstance inst;
    inst.world = std::move(w);
    inst.model = std::move(f.model);
    inst.var_names = std::move(f.var_names);
    inst.row_names = std::move(f.row_names);
    inst.truth.objective = *r.objective;
    inst.truth.status = TruthStatus::Optimal;
    inst.truth.solution = *r.point;
    inst.truth.solver_id = r.node_count > 1 ? "optbind-branch-bound" : "optbind-simplex";
    inst.tier = tier;
    inst.requested_seed = seed;
    inst.attempts = k + 1;
    return inst;
  }
  std::string msg = std::string("generation of ") + to_string(c) + " failed after " + std::to_string(kMaxRejections) +
                    " rejections";
  if (!reasons.empty()) msg += "; last: " + reasons.back();
  throw data_error(msg);
}

inline ProblemInstance generate_instance(Category c, Tier tier, std::uint64_t seed, const SolverConfig& cfg = {}) {
  return generate_instance(c, sample_dims(c, tier, seed), seed, cfg, tier);
}

// Rebuilds the model of a world through its category formulation.
inline Formulation formulate(const WorldState& w) {
  const auto& def = category_def(w.category);
  check_against_schema(w, def.schema);
  return def.formulate(w);
}

struct StructureCounts {
  std::size_t vars = 0, rows = 0, integer_vars = 0, nonzeros = 0;
  bool operator==(const StructureCounts&) const = default;
};

inline StructureCounts structure_counts(const StandardFormModel& m) {
  StructureCounts s;
  s.vars = m.num_vars();
  s.rows = m.num_rows();
  for (auto t : m.vartype) s.integer_vars += is_integral_type(t) ? 1 : 0;
  s.nonzeros = m.a.entries.size();
  return s;
}

inline std::string instance_dir_name(const ProblemInstance& p) {
  return std::string(to_string(p.world.category)) + "_" + to_string(p.tier) + "_" + std::to_string(p.requested_seed);
}

inline nlohmann::json instance_to_json(const ProblemInstance& p) {
  return nlohmann::json{{"world", world_to_json(p.world)},
                        {"model", model_to_json(p.model)},
                        {"truth", truth_to_json(p.truth)},
                        {"tier", to_string(p.tier)},
                        {"var_names", p.var_names},
                        {"row_names", p.row_names},
                        {"requested_seed", p.requested_seed},
                        {"attempts", p.attempts}};
}

inline ProblemInstance instance_from_json(const nlohmann::json& j) {
  try {
    ProblemInstance p;
    p.world = world_from_json(j.at("world"));
    p.model = model_from_json(j.at("model"));
    p.truth = truth_from_json(j.at("truth"));
    p.tier = parse_tier(j.at("tier").get<std::string>());
    p.var_names = j.at("var_names").get<std::vector<std::string>>();
    p.row_names = j.at("row_names").get<std::vector<std::string>>();
    p.requested_seed = j.value("requested_seed", p.world.seed);
    p.attempts = j.value("attempts", 1);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed instance: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Usage) throw data_error(e.what());
    throw;
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path.string());
  out << text;
  if (!out) throw data_error("failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw data_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

// Writes <root>/<category>_<tier>_<seed>/instance.json and returns the directory.
inline std::filesystem::path write_instance(const ProblemInstance& p, const std::filesystem::path& root) {
  const auto dir = root / instance_dir_name(p);
  std::filesystem::create_directories(dir);
  write_text(dir / "instance.json", instance_to_json(p).dump(1) + "\n");
  return dir;
}

inline ProblemInstance load_instance(const std::filesystem::path& dir_or_file) {
  auto path = dir_or_file;
  if (std::filesystem::is_directory(path)) path /= "instance.json";
  return instance_from_json(read_json(path));
}

}  // namespace optbind
