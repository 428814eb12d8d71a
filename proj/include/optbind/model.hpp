#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "optbind/error.hpp"

namespace optbind {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Min, Max };
enum class RowSense { LE, GE, EQ };
enum class VarType { Continuous, Integer, Binary };

inline bool is_integral_type(VarType t) { return t != VarType::Continuous; }

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double val = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// Row-major triplet storage.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Triplet> entries;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;
};

// min/max c'x (+ sum q_j x_j^2)  s.t.  A x {<=,>=,=} b,  lb <= x <= ub.
struct StandardFormModel {
  Sense sense = Sense::Min;
  std::vector<double> c;
  SparseMatrix a;
  std::vector<RowSense> row_sense;
  std::vector<double> b;
  std::vector<double> lb;
  std::vector<double> ub;
  std::vector<VarType> vartype;
  std::optional<std::vector<double>> q_diag;

  std::size_t num_vars() const { return c.size(); }
  std::size_t num_rows() const { return b.size(); }
  bool has_integers() const {
    return std::any_of(vartype.begin(), vartype.end(), is_integral_type);
  }
  bool has_quadratic() const {
    return q_diag && std::any_of(q_diag->begin(), q_diag->end(), [](double q) { return q != 0.0; });
  }

  friend bool operator==(const StandardFormModel&, const StandardFormModel&) = default;
};

struct Point {
  std::vector<double> x;
};

enum class TruthStatus { Optimal };

struct GroundTruth {
  double objective = 0.0;
  TruthStatus status = TruthStatus::Optimal;
  Point solution;
  std::string solver_id;
};

// ---------------------------------------------------------------------------
// Construction helper used by the generators and Phase-2 builders.

class ModelBuilder {
 public:
  explicit ModelBuilder(Sense sense = Sense::Min) { model_.sense = sense; }

  std::size_t add_var(double cost, double lb, double ub, VarType type = VarType::Continuous) {
    model_.c.push_back(cost);
    model_.lb.push_back(lb);
    model_.ub.push_back(ub);
    model_.vartype.push_back(type);
    return model_.c.size() - 1;
  }

  std::size_t add_row(const std::vector<std::pair<std::size_t, double>>& coeffs, RowSense sense,
                      double rhs) {
    const std::size_t r = model_.b.size();
    auto sorted = coeffs;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      // merge repeated columns
      if (!rows_.empty() && k > 0 && sorted[k].first == sorted[k - 1].first) {
        rows_.back().val += sorted[k].second;
        continue;
      }
      rows_.push_back({r, sorted[k].first, sorted[k].second});
    }
    model_.row_sense.push_back(sense);
    model_.b.push_back(rhs);
    return r;
  }

  void set_quadratic(std::size_t j, double q) {
    if (!model_.q_diag) model_.q_diag.emplace();
    model_.q_diag->resize(model_.c.size(), 0.0);
    (*model_.q_diag)[j] = q;
  }

  std::size_t num_vars() const { return model_.c.size(); }

  StandardFormModel build() const {
    StandardFormModel m = model_;
    m.a.rows = m.b.size();
    m.a.cols = m.c.size();
    for (const auto& t : rows_)
      if (t.val != 0.0) m.a.entries.push_back(t);
    if (m.q_diag) m.q_diag->resize(m.c.size(), 0.0);
    return m;
  }

 private:
  StandardFormModel model_;
  std::vector<Triplet> rows_;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string field;
  std::optional<std::size_t> index;
  std::string message;
};

inline std::vector<Violation> validate_model(const StandardFormModel& m) {
  std::vector<Violation> out;
  const std::size_t n = m.a.cols;
  const std::size_t rows = m.a.rows;
  if (m.c.size() != n)
    out.push_back({"c", std::nullopt,
                   "dimension mismatch: |c|=" + std::to_string(m.c.size()) +
                       " but A has " + std::to_string(n) + " columns"});
  if (m.b.size() != rows)
    out.push_back({"b", std::nullopt,
                   "dimension mismatch: |b|=" + std::to_string(m.b.size()) + " but A has " +
                       std::to_string(rows) + " rows"});
  if (m.row_sense.size() != m.b.size())
    out.push_back({"row_sense", std::nullopt, "dimension mismatch: |row_sense| != |b|"});
  if (m.lb.size() != m.c.size())
    out.push_back({"lb", std::nullopt, "dimension mismatch: |lb| != |c|"});
  if (m.ub.size() != m.c.size())
    out.push_back({"ub", std::nullopt, "dimension mismatch: |ub| != |c|"});
  if (m.vartype.size() != m.c.size())
    out.push_back({"vartype", std::nullopt, "dimension mismatch: |vartype| != |c|"});
  for (std::size_t k = 0; k < m.a.entries.size(); ++k) {
    const auto& t = m.a.entries[k];
    if (t.row >= rows || t.col >= n)
      out.push_back({"A", k, "triplet index outside " + std::to_string(rows) + "x" +
                                 std::to_string(n)});
    if (!std::isfinite(t.val)) out.push_back({"A", k, "non-finite coefficient"});
  }
  for (std::size_t j = 0; j < m.c.size(); ++j)
    if (!std::isfinite(m.c[j])) out.push_back({"c", j, "non-finite objective coefficient"});
  for (std::size_t i = 0; i < m.b.size(); ++i)
    if (!std::isfinite(m.b[i])) out.push_back({"b", i, "non-finite right-hand side"});
  const std::size_t nb = std::min({m.lb.size(), m.ub.size(), m.vartype.size()});
  for (std::size_t j = 0; j < nb; ++j) {
    if (std::isnan(m.lb[j]) || std::isnan(m.ub[j]) || m.lb[j] > m.ub[j])
      out.push_back({"lb", j, "lower bound exceeds upper bound"});
    if (m.vartype[j] == VarType::Binary && (m.lb[j] < 0.0 || m.ub[j] > 1.0))
      out.push_back({"ub", j, "binary bound violation: bounds must lie within [0,1]"});
  }
  if (m.q_diag) {
    if (m.q_diag->size() != m.c.size())
      out.push_back({"q_diag", std::nullopt, "dimension mismatch: |q_diag| != |c|"});
    for (std::size_t j = 0; j < m.q_diag->size(); ++j)
      if (!((*m.q_diag)[j] >= 0.0))
        out.push_back({"q_diag", j, "quadratic term must be non-negative"});
  }
  return out;
}

inline void require_valid(const StandardFormModel& m) {
  auto v = validate_model(m);
  if (!v.empty()) {
    std::string msg = "invalid model: " + v.front().field;
    if (v.front().index) msg += "[" + std::to_string(*v.front().index) + "]";
    throw data_error(msg + ": " + v.front().message);
  }
}

// ---------------------------------------------------------------------------
// Point evaluation

struct FeasibilityTolerance {
  double absolute = 1e-6;     // additive row/bound tolerance
  double relative = 0.0;      // scaled by max(1, |rhs|) and added to `absolute`
  double integrality = 1e-5;
};

struct PointEvaluation {
  bool feasible = true;
  std::vector<std::size_t> violated_rows;
  std::vector<std::size_t> violated_bounds;
  std::vector<std::size_t> non_integral;
  double objective = 0.0;
};

namespace detail {

// Neumaier summation; activities of generated rows mix magnitudes.
class StableSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

inline std::vector<double> row_activities(const StandardFormModel& m, std::span<const double> x) {
  std::vector<detail::StableSum> acc(m.num_rows());
  for (const auto& t : m.a.entries) acc[t.row].add(t.val * x[t.col]);
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
  return out;
}

inline double objective_value(const StandardFormModel& m, std::span<const double> x) {
  detail::StableSum s;
  for (std::size_t j = 0; j < m.c.size(); ++j) s.add(m.c[j] * x[j]);
  if (m.q_diag)
    for (std::size_t j = 0; j < m.q_diag->size(); ++j) s.add((*m.q_diag)[j] * x[j] * x[j]);
  return s.value();
}

inline PointEvaluation evaluate_point(const StandardFormModel& m, const Point& p,
                                      const FeasibilityTolerance& tol) {
  if (p.x.size() != m.num_vars())
    throw data_error("point has " + std::to_string(p.x.size()) + " entries, model has " +
                     std::to_string(m.num_vars()) + " variables");
  if (!(tol.absolute > 0.0)) throw usage_error("feasibility tolerance must be positive");
  PointEvaluation ev;
  const auto act = row_activities(m, p.x);
  for (std::size_t i = 0; i < act.size(); ++i) {
    const double slack_tol = tol.absolute + tol.relative * std::max(1.0, std::abs(m.b[i]));
    const double r = act[i] - m.b[i];
    bool ok = true;
    switch (m.row_sense[i]) {
      case RowSense::LE: ok = r <= slack_tol; break;
      case RowSense::GE: ok = r >= -slack_tol; break;
      case RowSense::EQ: ok = std::abs(r) <= slack_tol; break;
    }
    if (!ok) ev.violated_rows.push_back(i);
  }
  for (std::size_t j = 0; j < m.num_vars(); ++j) {
    const double v = p.x[j];
    if (v < m.lb[j] - tol.absolute || v > m.ub[j] + tol.absolute) ev.violated_bounds.push_back(j);
    if (is_integral_type(m.vartype[j]) && std::abs(v - std::round(v)) > tol.integrality)
      ev.non_integral.push_back(j);
  }
  ev.feasible = ev.violated_rows.empty() && ev.violated_bounds.empty() && ev.non_integral.empty();
  ev.objective = objective_value(m, p.x);
  return ev;
}

inline PointEvaluation evaluate_point(const StandardFormModel& m, const Point& p, double tol) {
  return evaluate_point(m, p, FeasibilityTolerance{tol, 0.0, tol});
}

inline std::vector<std::vector<double>> to_dense(const StandardFormModel& m) {
  if (m.a.rows * m.a.cols > 4'000'000) throw usage_error("model too large for dense export");
  std::vector<std::vector<double>> d(m.a.rows, std::vector<double>(m.a.cols, 0.0));
  for (const auto& t : m.a.entries) d[t.row][t.col] += t.val;
  return d;
}

// ---------------------------------------------------------------------------
// JSON interchange: keys sense, c, A, row_sense, b, lb, ub, vartype, q_diag.

inline const char* to_string(Sense s) { return s == Sense::Min ? "MIN" : "MAX"; }
inline const char* to_string(RowSense s) {
  switch (s) {
    case RowSense::LE: return "LE";
    case RowSense::GE: return "GE";
    default: return "EQ";
  }
}
inline const char* to_string(VarType t) {
  switch (t) {
    case VarType::Continuous: return "CONTINUOUS";
    case VarType::Integer: return "INTEGER";
    default: return "BINARY";
  }
}

inline Sense parse_sense(const std::string& s) {
  if (s == "MIN" || s == "MINIMIZE") return Sense::Min;
  if (s == "MAX" || s == "MAXIMIZE") return Sense::Max;
  throw data_error("unknown objective sense '" + s + "'");
}
inline RowSense parse_row_sense(const std::string& s) {
  if (s == "LE" || s == "<=") return RowSense::LE;
  if (s == "GE" || s == ">=") return RowSense::GE;
  if (s == "EQ" || s == "=" || s == "==") return RowSense::EQ;
  throw data_error("unknown row sense '" + s + "'");
}
inline VarType parse_vartype(const std::string& s) {
  if (s == "CONTINUOUS" || s == "C") return VarType::Continuous;
  if (s == "INTEGER" || s == "I") return VarType::Integer;
  if (s == "BINARY" || s == "B") return VarType::Binary;
  throw data_error("unknown variable type '" + s + "'");
}

// Infinite bounds travel as the strings "inf" / "-inf".
inline nlohmann::json bound_to_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}
inline double bound_from_json(const nlohmann::json& j) {
  if (j.is_null()) return kInf;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
    throw data_error("bad bound value '" + s + "'");
  }
  return j.get<double>();
}

inline nlohmann::json model_to_json(const StandardFormModel& m) {
  nlohmann::json j;
  j["sense"] = to_string(m.sense);
  j["c"] = m.c;
  auto trip = nlohmann::json::array();
  for (const auto& t : m.a.entries) trip.push_back({t.row, t.col, t.val});
  j["A"] = std::move(trip);
  auto rs = nlohmann::json::array();
  for (auto s : m.row_sense) rs.push_back(to_string(s));
  j["row_sense"] = std::move(rs);
  j["b"] = m.b;
  auto lb = nlohmann::json::array();
  auto ub = nlohmann::json::array();
  for (double v : m.lb) lb.push_back(bound_to_json(v));
  for (double v : m.ub) ub.push_back(bound_to_json(v));
  j["lb"] = std::move(lb);
  j["ub"] = std::move(ub);
  auto vt = nlohmann::json::array();
  for (auto t : m.vartype) vt.push_back(to_string(t));
  j["vartype"] = std::move(vt);
  j["q_diag"] = m.q_diag ? nlohmann::json(*m.q_diag) : nlohmann::json(nullptr);
  return j;
}

inline StandardFormModel model_from_json(const nlohmann::json& j) {
  try {
    StandardFormModel m;
    m.sense = parse_sense(j.at("sense").get<std::string>());
    m.c = j.at("c").get<std::vector<double>>();
    m.b = j.at("b").get<std::vector<double>>();
    m.a.rows = m.b.size();
    m.a.cols = m.c.size();
    for (const auto& t : j.at("A")) {
      if (!t.is_array() || t.size() != 3) throw data_error("A triplets must be [row, col, val]");
      Triplet tr{t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<double>()};
      m.a.rows = std::max(m.a.rows, tr.row + 1);
      m.a.cols = std::max(m.a.cols, tr.col + 1);
      m.a.entries.push_back(tr);
    }
    std::stable_sort(m.a.entries.begin(), m.a.entries.end(),
                     [](const Triplet& x, const Triplet& y) {
                       return x.row != y.row ? x.row < y.row : x.col < y.col;
                     });
    for (const auto& s : j.at("row_sense")) m.row_sense.push_back(parse_row_sense(s.get<std::string>()));
    for (const auto& v : j.at("lb")) m.lb.push_back(v.is_null() ? -kInf : bound_from_json(v));
    for (const auto& v : j.at("ub")) m.ub.push_back(bound_from_json(v));
    for (const auto& v : j.at("vartype")) m.vartype.push_back(parse_vartype(v.get<std::string>()));
    if (j.contains("q_diag") && !j["q_diag"].is_null())
      m.q_diag = j["q_diag"].get<std::vector<double>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed model JSON: ") + e.what());
  }
}

inline nlohmann::json truth_to_json(const GroundTruth& t) {
  return {{"objective", t.objective},
          {"status", "OPTIMAL"},
          {"solution", t.solution.x},
          {"solver_id", t.solver_id}};
}

inline GroundTruth truth_from_json(const nlohmann::json& j) {
  if (j.at("status").get<std::string>() != "OPTIMAL")
    throw data_error("ground truth status must be OPTIMAL");
  GroundTruth t;
  t.objective = j.at("objective").get<double>();
  t.solution.x = j.at("solution").get<std::vector<double>>();
  t.solver_id = j.value("solver_id", "");
  return t;
}

}  // namespace optbind
