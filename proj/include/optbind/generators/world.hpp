#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "optbind/error.hpp"
#include "optbind/model.hpp"
#include "optbind/numfmt.hpp"
#include "optbind/rng.hpp"

namespace optbind {

enum class Category {
  ResourceAllocation,
  Transportation,
  DisasterResponse,
  Jssp,
  Vrptw,
  Rcpsp,
  FacilityLocation,
  PowerTransmission,
  QueuingStaffing,
  StochasticTransportation,
  MultiObjectiveTransportation,
  ModifiedFacilityLocation,
};

inline constexpr std::array<Category, 12> kAllCategories = {
    Category::ResourceAllocation,       Category::Transportation,
    Category::DisasterResponse,         Category::Jssp,
    Category::Vrptw,                    Category::Rcpsp,
    Category::FacilityLocation,         Category::PowerTransmission,
    Category::QueuingStaffing,          Category::StochasticTransportation,
    Category::MultiObjectiveTransportation, Category::ModifiedFacilityLocation,
};

inline const char* to_string(Category c) {
  switch (c) {
    case Category::ResourceAllocation: return "resource_allocation";
    case Category::Transportation: return "transportation";
    case Category::DisasterResponse: return "disaster_response";
    case Category::Jssp: return "jssp";
    case Category::Vrptw: return "vrptw";
    case Category::Rcpsp: return "rcpsp";
    case Category::FacilityLocation: return "facility_location";
    case Category::PowerTransmission: return "power_transmission";
    case Category::QueuingStaffing: return "queuing_staffing";
    case Category::StochasticTransportation: return "stochastic_transportation";
    case Category::MultiObjectiveTransportation: return "multi_objective_transportation";
    case Category::ModifiedFacilityLocation: return "modified_facility_location";
  }
  return "unknown";
}

inline Category parse_category(std::string s) {
  for (auto& ch : s) ch = ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (auto c : kAllCategories)
    if (s == to_string(c)) return c;
  throw usage_error("unknown category '" + s + "'");
}

enum class Tier { Small, Large };

inline const char* to_string(Tier t) { return t == Tier::Small ? "small" : "large"; }

inline Tier parse_tier(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "small") return Tier::Small;
  if (s == "large") return Tier::Large;
  throw usage_error("unknown tier '" + s + "'");
}

// Only the categories whose documents are meant to stress long-context binding
// have a large tier.
inline bool has_large_tier(Category c) {
  return c == Category::Transportation || c == Category::MultiObjectiveTransportation ||
         c == Category::QueuingStaffing;
}

// Dense numeric array with a row-major shape. A scalar has an empty shape.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  static Array scalar(double v) { return Array{{}, {v}}; }
  static Array vector(std::vector<double> v) {
    Array a;
    a.shape = {v.size()};
    a.data = std::move(v);
    return a;
  }
  static Array matrix(std::size_t r, std::size_t c, std::vector<double> v) {
    if (v.size() != r * c) throw internal_error("matrix data does not match its shape");
    return Array{{r, c}, std::move(v)};
  }
  static Array matrix(const std::vector<std::vector<double>>& rows) {
    Array a;
    a.shape = {rows.size(), rows.empty() ? 0 : rows.front().size()};
    for (const auto& r : rows) a.data.insert(a.data.end(), r.begin(), r.end());
    return a;
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  double value() const { return data.at(0); }
  double operator()(std::size_t i) const { return data[i]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  bool operator==(const Array&) const = default;
};

using Dims = std::map<std::string, std::int64_t>;

struct WorldState {
  Category category = Category::Transportation;
  std::uint64_t seed = 0;
  Dims dims;
  std::map<std::string, Array> params;
  nlohmann::json meta = nlohmann::json::object();

  std::int64_t dim(const std::string& name) const {
    auto it = dims.find(name);
    if (it == dims.end()) throw data_error("world state has no dimension '" + name + "'");
    return it->second;
  }
  std::size_t count(const std::string& name) const { return static_cast<std::size_t>(dim(name)); }

  const Array& param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw data_error("world state has no parameter '" + name + "'");
    return it->second;
  }
  bool operator==(const WorldState&) const = default;
};

// Element type of a schema field.
enum class ElementType { Float, Int };

struct FieldSpec {
  std::string name;
  std::vector<std::string> shape;  // names of dims; empty for a scalar
  ElementType type = ElementType::Float;
  std::string note;
};

struct BindSchema {
  std::vector<std::string> dims;
  std::vector<FieldSpec> fields;

  const FieldSpec* find(const std::string& name) const {
    for (const auto& f : fields)
      if (f.name == name) return &f;
    return nullptr;
  }
};

// Symbolic shape such as "float[num_sources][num_destinations]".
inline std::string shape_string(const FieldSpec& f) {
  std::string s = f.type == ElementType::Int ? "int" : "float";
  for (const auto& d : f.shape) s += "[" + d + "]";
  return s;
}

struct Formulation {
  StandardFormModel model;
  std::vector<std::string> var_names;
  std::vector<std::string> row_names;
};

inline std::vector<std::size_t> expected_shape(const FieldSpec& f, const Dims& dims) {
  std::vector<std::size_t> out;
  for (const auto& d : f.shape) {
    auto it = dims.find(d);
    if (it == dims.end()) throw data_error("field '" + f.name + "' uses unknown dimension '" + d + "'");
    if (it->second < 0) throw data_error("dimension '" + d + "' is negative");
    out.push_back(static_cast<std::size_t>(it->second));
  }
  return out;
}

// Checks that every schema field is present with the shape implied by dims.
inline void check_against_schema(const WorldState& w, const BindSchema& schema) {
  for (const auto& d : schema.dims)
    if (!w.dims.count(d)) throw data_error("missing dimension '" + d + "'");
  for (const auto& f : schema.fields) {
    auto it = w.params.find(f.name);
    if (it == w.params.end()) throw data_error("missing field '" + f.name + "'");
    const auto want = expected_shape(f, w.dims);
    if (it->second.shape != want) throw data_error("field '" + f.name + "' has the wrong shape");
    std::size_t n = 1;
    for (auto v : want) n *= v;
    if (it->second.data.size() != n) throw data_error("field '" + f.name + "' has the wrong number of values");
    for (double v : it->second.data) {
      if (std::isnan(v)) throw data_error("field '" + f.name + "' contains NaN");
      if (f.type == ElementType::Int && std::isfinite(v) && v != std::floor(v))
        throw data_error("field '" + f.name + "' must hold integers");
    }
  }
}

// ---- JSON ----

inline nlohmann::json array_to_json(const Array& a) {
  nlohmann::json data = nlohmann::json::array();
  for (double v : a.data) data.push_back(bound_to_json(v));
  return nlohmann::json{{"shape", a.shape}, {"data", data}};
}

inline Array array_from_json(const nlohmann::json& j) {
  Array a;
  a.shape = j.at("shape").get<std::vector<std::size_t>>();
  for (const auto& v : j.at("data")) a.data.push_back(bound_from_json(v));
  std::size_t n = 1;
  for (auto s : a.shape) n *= s;
  if (n != a.data.size()) throw data_error("array data does not match its shape");
  return a;
}

inline nlohmann::json world_to_json(const WorldState& w) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : w.params) params[k] = array_to_json(v);
  return nlohmann::json{{"category", to_string(w.category)},
                        {"seed", w.seed},
                        {"dims", w.dims},
                        {"params", params},
                        {"meta", w.meta}};
}

inline WorldState world_from_json(const nlohmann::json& j) {
  try {
    WorldState w;
    w.category = parse_category(j.at("category").get<std::string>());
    w.seed = j.at("seed").get<std::uint64_t>();
    w.dims = j.at("dims").get<Dims>();
    for (const auto& [k, v] : j.at("params").items()) w.params[k] = array_from_json(v);
    if (j.contains("meta")) w.meta = j.at("meta");
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed world state: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Usage) throw data_error(e.what());
    throw;
  }
}

// Nested JSON arrays in row-major order, with infinities written as null.
inline nlohmann::json array_to_nested(const Array& a, ElementType type) {
  auto leaf = [&](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return nullptr;
    if (type == ElementType::Int) return static_cast<std::int64_t>(v);
    return v;
  };
  if (a.shape.empty()) return leaf(a.data.at(0));
  std::function<nlohmann::json(std::size_t, std::size_t)> rec = [&](std::size_t axis, std::size_t offset) {
    nlohmann::json out = nlohmann::json::array();
    std::size_t stride = 1;
    for (std::size_t k = axis + 1; k < a.shape.size(); ++k) stride *= a.shape[k];
    for (std::size_t i = 0; i < a.shape[axis]; ++i) {
      if (axis + 1 == a.shape.size()) out.push_back(leaf(a.data[offset + i]));
      else out.push_back(rec(axis + 1, offset + i * stride));
    }
    return out;
  };
  return rec(0, 0);
}

inline Array array_from_nested(const nlohmann::json& j, const std::vector<std::size_t>& shape,
                               const std::string& name) {
  Array a;
  a.shape = shape;
  auto leaf = [&](const nlohmann::json& v) {
    if (v.is_null()) return kInf;
    if (!v.is_number()) throw data_error("field '" + name + "' holds a non-numeric value");
    return v.get<double>();
  };
  if (shape.empty()) {
    a.data.push_back(leaf(j));
    return a;
  }
  std::function<void(const nlohmann::json&, std::size_t)> rec = [&](const nlohmann::json& node, std::size_t axis) {
    if (!node.is_array() || node.size() != shape[axis])
      throw data_error("field '" + name + "' has the wrong shape along axis " + std::to_string(axis));
    for (const auto& e : node) {
      if (axis + 1 == shape.size()) a.data.push_back(leaf(e));
      else rec(e, axis + 1);
    }
  };
  rec(j, 0);
  return a;
}

// ---- helpers shared by the category builders ----

namespace gen {

inline std::uint64_t world_seed(Category c, std::uint64_t seed, const Dims& dims) {
  std::uint64_t h = mix_seed(seed, fnv1a(to_string(c)));
  for (const auto& [k, v] : dims) h = mix_seed(h, fnv1a(k) ^ static_cast<std::uint64_t>(v));
  return h;
}

inline double draw2(Rng& rng, double lo, double hi) { return round_to(rng.uniform(lo, hi)); }

inline double ceil2(double v) { return round_to(std::ceil(v * 100.0 - 1e-7) / 100.0); }
inline double floor2(double v) { return round_to(std::floor(v * 100.0 + 1e-7) / 100.0); }

inline std::string label(const char* prefix, std::size_t i) { return prefix + std::to_string(i + 1); }

inline std::int64_t require_dim(const Dims& d, const std::string& name, std::int64_t lo, std::int64_t hi) {
  auto it = d.find(name);
  if (it == d.end()) throw usage_error("missing dimension '" + name + "'");
  if (it->second < lo || it->second > hi)
    throw usage_error("dimension " + name + "=" + std::to_string(it->second) + " outside supported range [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return it->second;
}

using Terms = std::vector<std::pair<std::size_t, double>>;

class FormulationBuilder {
 public:
  explicit FormulationBuilder(Sense sense) : b_(sense) {}

  std::size_t var(std::string name, double cost, double lb, double ub, VarType type = VarType::Continuous) {
    names_.push_back(std::move(name));
    return b_.add_var(cost, lb, ub, type);
  }
  void row(std::string name, const Terms& terms, RowSense sense, double rhs) {
    rows_.push_back(std::move(name));
    b_.add_row(terms, sense, rhs);
  }
  void quadratic(std::size_t j, double q) { b_.set_quadratic(j, q); }

  Formulation finish() const { return Formulation{b_.build(), names_, rows_}; }

 private:
  ModelBuilder b_;
  std::vector<std::string> names_;
  std::vector<std::string> rows_;
};

}  // namespace gen

}  // namespace optbind
