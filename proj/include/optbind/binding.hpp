#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "optbind/documents.hpp"
#include "optbind/generators.hpp"
#include "optbind/model.hpp"
#include "optbind/numfmt.hpp"

namespace optbind {

// Extraction format: the data a binding step pulls out of a document, before
// a deterministic builder turns it into a model.
struct ExtractedVariable {
  std::string name;
  VarType type = VarType::Continuous;
  double lb = 0.0;
  double ub = kInf;
  double obj = 0.0;

  friend bool operator==(const ExtractedVariable&, const ExtractedVariable&) = default;
};

struct ExtractedConstraint {
  std::string name;
  std::vector<std::pair<std::string, double>> coeffs;  // in listed order
  RowSense sense = RowSense::LE;
  double rhs = 0.0;

  friend bool operator==(const ExtractedConstraint&, const ExtractedConstraint&) = default;
};

struct BindingExtraction {
  Sense goal = Sense::Min;
  std::vector<ExtractedVariable> variables;
  std::vector<ExtractedConstraint> constraints;

  friend bool operator==(const BindingExtraction&, const BindingExtraction&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline const char* sense_symbol(RowSense s) {
  switch (s) {
    case RowSense::LE: return "<=";
    case RowSense::GE: return ">=";
    default: return "=";
  }
}

inline RowSense parse_sense_symbol(const std::string& s) {
  if (s == "<=" || s == "≤" || s == "LE") return RowSense::LE;
  if (s == ">=" || s == "≥" || s == "GE") return RowSense::GE;
  if (s == "=" || s == "==" || s == "EQ") return RowSense::EQ;
  throw data_error("unknown constraint sense '" + s + "'");
}

inline const char* type_name(VarType t) {
  switch (t) {
    case VarType::Continuous: return "continuous";
    case VarType::Integer: return "integer";
    default: return "binary";
  }
}

inline VarType parse_type_name(const std::string& s) {
  if (s == "continuous" || s == "CONTINUOUS") return VarType::Continuous;
  if (s == "integer" || s == "INTEGER") return VarType::Integer;
  if (s == "binary" || s == "BINARY") return VarType::Binary;
  throw data_error("unknown variable type '" + s + "'");
}

// Infinite bounds travel as null.
inline nlohmann::ordered_json bound_json(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline double json_number(const nlohmann::ordered_json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
    if (auto v = parse_number(s)) return *v;
    throw data_error("not a number: '" + s + "'");
  }
  return j.get<double>();
}

inline double bound_value(const nlohmann::ordered_json& j, double if_null) {
  return j.is_null() ? if_null : json_number(j);
}

}  // namespace detail

// Empty iff names are unique and non-empty, every coefficient names a declared
// variable once, and all numbers are finite with lb <= ub. Names are trimmed
// in place.
inline std::vector<Violation> validate_extraction(BindingExtraction& e) {
  std::vector<Violation> out;
  std::set<std::string> names;
  for (std::size_t j = 0; j < e.variables.size(); ++j) {
    auto& v = e.variables[j];
    v.name = detail::trim(v.name);
    if (v.name.empty()) out.push_back({"variables", j, "empty variable name"});
    else if (!names.insert(v.name).second) out.push_back({"variables", j, "duplicate variable name '" + v.name + "'"});
    if (!std::isfinite(v.obj)) out.push_back({"variables", j, "non-finite objective coefficient"});
    if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub || v.lb == kInf || v.ub == -kInf)
      out.push_back({"variables", j, "invalid bounds for '" + v.name + "'"});
  }
  for (std::size_t i = 0; i < e.constraints.size(); ++i) {
    auto& c = e.constraints[i];
    c.name = detail::trim(c.name);
    std::set<std::string> seen;
    for (auto& [name, val] : c.coeffs) {
      name = detail::trim(name);
      if (!names.count(name)) out.push_back({"constraints", i, "unknown variable '" + name + "'"});
      if (!seen.insert(name).second) out.push_back({"constraints", i, "duplicate coefficient for '" + name + "'"});
      if (!std::isfinite(val)) out.push_back({"constraints", i, "non-finite coefficient for '" + name + "'"});
    }
    if (!std::isfinite(c.rhs)) out.push_back({"constraints", i, "non-finite right-hand side"});
  }
  return out;
}

inline BindingExtraction require_valid_extraction(BindingExtraction e) {
  const auto v = validate_extraction(e);
  if (!v.empty()) {
    std::string msg = "invalid extraction:";
    for (const auto& x : v)
      msg += " " + x.field + (x.index ? "[" + std::to_string(*x.index) + "]" : "") + ": " + x.message + ";";
    throw data_error(msg);
  }
  return e;
}

// Variables in declaration order, rows in listed order, coefficients in the
// order given.
inline StandardFormModel build_from_extraction(BindingExtraction e) {
  e = require_valid_extraction(std::move(e));
  StandardFormModel m;
  m.sense = e.goal;
  std::map<std::string, std::size_t> index;
  for (const auto& v : e.variables) {
    index[v.name] = m.c.size();
    m.c.push_back(v.obj);
    m.lb.push_back(v.lb);
    m.ub.push_back(v.ub);
    m.vartype.push_back(v.type);
  }
  m.a.cols = m.c.size();
  for (const auto& c : e.constraints) {
    const std::size_t row = m.b.size();
    for (const auto& [name, val] : c.coeffs) m.a.entries.push_back({row, index.at(name), val});
    m.row_sense.push_back(c.sense);
    m.b.push_back(c.rhs);
  }
  m.a.rows = m.b.size();
  require_valid(m);
  return m;
}

// The extraction a perfect binding step would produce for a model.
inline BindingExtraction extraction_from_model(const StandardFormModel& m, const std::vector<std::string>& var_names,
                                               const std::vector<std::string>& row_names = {}) {
  require_valid(m);
  if (m.has_quadratic()) throw usage_error("extractions carry linear objectives only");
  if (var_names.size() != m.num_vars()) throw usage_error("one name per variable is required");
  BindingExtraction e;
  e.goal = m.sense;
  for (std::size_t j = 0; j < m.num_vars(); ++j) e.variables.push_back({var_names[j], m.vartype[j], m.lb[j], m.ub[j], m.c[j]});
  e.constraints.resize(m.num_rows());
  for (std::size_t i = 0; i < m.num_rows(); ++i) {
    e.constraints[i].name = i < row_names.size() ? row_names[i] : "c" + std::to_string(i);
    e.constraints[i].sense = m.row_sense[i];
    e.constraints[i].rhs = m.b[i];
  }
  for (const auto& t : m.a.entries) e.constraints[t.row].coeffs.emplace_back(var_names[t.col], t.val);
  return e;
}

inline nlohmann::ordered_json extraction_to_json(const BindingExtraction& e) {
  nlohmann::ordered_json j;
  j["goal"] = e.goal == Sense::Min ? "MINIMIZE" : "MAXIMIZE";
  j["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : e.variables)
    j["variables"].push_back({{"name", v.name},
                              {"type", detail::type_name(v.type)},
                              {"lb", detail::bound_json(v.lb)},
                              {"ub", detail::bound_json(v.ub)},
                              {"obj", v.obj}});
  j["constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : e.constraints) {
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::object();
    for (const auto& [n, v] : c.coeffs) coeffs[n] = v;
    nlohmann::ordered_json row;
    if (!c.name.empty()) row["name"] = c.name;
    row["coeffs"] = std::move(coeffs);
    row["sense"] = detail::sense_symbol(c.sense);
    row["rhs"] = c.rhs;
    j["constraints"].push_back(std::move(row));
  }
  return j;
}

// Accepts numbers or numeric strings wherever a number is expected.
inline BindingExtraction extraction_from_json(const nlohmann::ordered_json& j) {
  auto num = [](const nlohmann::ordered_json& x) { return detail::json_number(x); };
  try {
    BindingExtraction e;
    const auto goal = j.at("goal").get<std::string>();
    if (goal == "MINIMIZE" || goal == "minimize" || goal == "min") e.goal = Sense::Min;
    else if (goal == "MAXIMIZE" || goal == "maximize" || goal == "max") e.goal = Sense::Max;
    else throw data_error("unknown goal '" + goal + "'");
    for (const auto& v : j.at("variables")) {
      ExtractedVariable x;
      x.name = v.at("name").get<std::string>();
      x.type = v.contains("type") ? detail::parse_type_name(v.at("type").get<std::string>()) : VarType::Continuous;
      x.lb = v.contains("lb") ? detail::bound_value(v.at("lb"), -kInf) : 0.0;
      x.ub = v.contains("ub") ? detail::bound_value(v.at("ub"), kInf) : kInf;
      if (x.type == VarType::Binary && !v.contains("ub")) x.ub = 1.0;
      x.obj = v.contains("obj") ? num(v.at("obj")) : 0.0;
      e.variables.push_back(std::move(x));
    }
    if (j.contains("constraints"))
      for (const auto& c : j.at("constraints")) {
        ExtractedConstraint r;
        r.name = c.value("name", "");
        for (const auto& [k, v] : c.at("coeffs").items()) r.coeffs.emplace_back(k, num(v));
        r.sense = detail::parse_sense_symbol(c.at("sense").get<std::string>());
        r.rhs = num(c.at("rhs"));
        e.constraints.push_back(std::move(r));
      }
    return e;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed extraction: ") + e.what());
  }
}

inline std::string compact_serialize(const BindingExtraction& e) { return extraction_to_json(e).dump(); }
inline std::string pretty_serialize(const BindingExtraction& e) { return extraction_to_json(e).dump(4); }

inline BindingExtraction parse_extraction(const std::string& text) {
  try {
    return extraction_from_json(nlohmann::ordered_json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw data_error(std::string("extraction is not valid JSON: ") + e.what());
  }
}

// Pulls the outermost JSON object out of a model transcript, skipping prose
// and code fences around it.
inline BindingExtraction ingest_extraction_transcript(const std::string& transcript) {
  const auto b = transcript.find('{');
  const auto e = transcript.rfind('}');
  if (b == std::string::npos || e == std::string::npos || e < b)
    throw data_error("transcript holds no JSON object");
  return parse_extraction(transcript.substr(b, e - b + 1));
}

// ---- Phase-2 builders over BIND data files ----

inline StandardFormModel build_from_bind(Category c, const std::filesystem::path& data_file) {
  return formulate(world_from_bind_data(c, read_json(data_file))).model;
}

inline StandardFormModel build_transportation_from_bind(const std::filesystem::path& data_file) {
  return build_from_bind(Category::Transportation, data_file);
}

inline StandardFormModel build_jssp_from_bind(const std::filesystem::path& data_file) {
  return build_from_bind(Category::Jssp, data_file);
}

inline StandardFormModel build_resource_allocation_from_bind(const std::filesystem::path& data_file) {
  return build_from_bind(Category::ResourceAllocation, data_file);
}

}  // namespace optbind
