#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "optbind/adapter.hpp"
#include "optbind/model.hpp"
#include "optbind/solver.hpp"

namespace optbind {

inline constexpr double kScoreTolerance = 1e-4;

enum class Outcome { Pass, ExecError, ModelingError, BindingError, NonoptimalStatus, WrongObjective };
enum class FailureClass { Exec, Modeling, Binding };
enum class IsoClass { Isomorphic, MutualFeasible, OptimumOnly };
enum class SubmissionSource { StructuredFile, Adapter };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "PASS";
    case Outcome::ExecError: return "EXEC_ERROR";
    case Outcome::ModelingError: return "MODELING_ERROR";
    case Outcome::BindingError: return "BINDING_ERROR";
    case Outcome::NonoptimalStatus: return "NONOPTIMAL_STATUS";
    case Outcome::WrongObjective: return "WRONG_OBJECTIVE";
  }
  return "UNKNOWN";
}

inline Outcome parse_outcome(const std::string& s) {
  for (auto o : {Outcome::Pass, Outcome::ExecError, Outcome::ModelingError, Outcome::BindingError,
                 Outcome::NonoptimalStatus, Outcome::WrongObjective})
    if (s == to_string(o)) return o;
  throw data_error("unknown outcome '" + s + "'");
}

inline const char* to_string(FailureClass f) {
  switch (f) {
    case FailureClass::Exec: return "EXEC_ERROR";
    case FailureClass::Modeling: return "MODELING_ERROR";
    default: return "BINDING_ERROR";
  }
}

inline const char* to_string(IsoClass i) {
  switch (i) {
    case IsoClass::Isomorphic: return "ISOMORPHIC";
    case IsoClass::MutualFeasible: return "MUTUAL_FEASIBLE";
    default: return "OPTIMUM_ONLY";
  }
}

inline IsoClass parse_iso(const std::string& s) {
  for (auto i : {IsoClass::Isomorphic, IsoClass::MutualFeasible, IsoClass::OptimumOnly})
    if (s == to_string(i)) return i;
  throw data_error("unknown isomorphism class '" + s + "'");
}

struct CandidateSubmission {
  std::string instance_id;
  SubmissionSource source = SubmissionSource::StructuredFile;
  std::optional<StandardFormModel> model;
  std::optional<SolveResult> result;
  std::string error;     // why no model was produced
  std::string response;  // raw text returned by the candidate, if any
};

struct Verdict {
  std::string instance_id;
  std::string category;
  int attempt = 0;
  Outcome outcome = Outcome::ExecError;
  std::optional<double> rel_error;
  std::optional<IsoClass> iso;
  std::optional<FailureClass> failure;
  std::optional<std::size_t> tokens;  // prompt plus response, proxy count
  std::string notes;

  bool passed() const { return outcome == Outcome::Pass; }
};

inline double relative_error(double candidate, double truth) {
  return std::abs(candidate - truth) / std::max(std::abs(truth), 1e-9);
}

// PASS iff the candidate reports OPTIMAL with an objective within `tol`
// relative of the truth. Failures with an objective are WRONG_OBJECTIVE until
// classify_failure sees the gold model.
inline Verdict score_candidate(const CandidateSubmission& sub, double truth_objective, double tol = kScoreTolerance) {
  if (!(tol > 0)) throw usage_error("score tolerance must be positive");
  Verdict v;
  v.instance_id = sub.instance_id;
  if (!sub.result) {
    v.outcome = Outcome::ExecError;
    v.notes = sub.error.empty() ? "no solver result" : sub.error;
    return v;
  }
  const auto& r = *sub.result;
  if (r.status != SolveStatus::Optimal) {
    v.outcome = Outcome::NonoptimalStatus;
    v.notes = std::string("candidate status ") + to_string(r.status);
    return v;
  }
  if (!r.objective || !std::isfinite(*r.objective)) {
    v.outcome = Outcome::ExecError;
    v.notes = "optimal result without a finite objective";
    return v;
  }
  v.rel_error = relative_error(*r.objective, truth_objective);
  v.outcome = *v.rel_error <= tol ? Outcome::Pass : Outcome::WrongObjective;
  return v;
}

inline FailureClass classify_failure(const CandidateSubmission& sub, const StandardFormModel& gold) {
  if (!sub.model) return FailureClass::Exec;
  const bool same = sub.model->num_vars() == gold.num_vars() && sub.model->num_rows() == gold.num_rows();
  return same ? FailureClass::Binding : FailureClass::Modeling;
}

// ---- canonical form ----

namespace detail {

// Numbers are compared after rounding to ten significant digits.
inline std::string canon_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  std::string s(buf, res.ptr);
  return s == "-0" ? "0" : s;
}

struct CanonRow {
  RowSense sense;
  double rhs;
  std::vector<std::pair<std::size_t, double>> terms;  // original column, coefficient
};

}  // namespace detail

struct CanonicalForm {
  std::vector<std::string> columns;  // canonical order
  std::vector<std::string> rows;     // canonical order
  std::vector<std::size_t> column_order;  // canonical position -> original column
  std::string bytes;

  bool operator==(const CanonicalForm& o) const { return bytes == o.bytes; }
};

// Deterministic serialization that is invariant under row and column
// permutations. Objectives are put in minimization form, GE rows are negated
// into LE rows, EQ rows get a sign fixed by their coefficient multiset and
// integer bounds are tightened to the effective integer range. Columns are
// ordered by (cost, lb, ub, type) with ties split by colour refinement over
// the row structure and, where that stalls, by individualization; rows are
// then ordered by (sense, rhs, coefficients).
inline CanonicalForm canonicalize(const StandardFormModel& m) {
  require_valid(m);
  using detail::canon_number;
  const std::size_t n = m.num_vars();
  const double sgn = m.sense == Sense::Max ? -1.0 : 1.0;

  std::vector<std::string> col_key(n);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = m.lb[j], hi = m.ub[j];
    const bool integral = is_integral_type(m.vartype[j]);
    if (integral) {
      if (std::isfinite(lo)) lo = std::ceil(lo - 1e-9);
      if (std::isfinite(hi)) hi = std::floor(hi + 1e-9);
    }
    const double q = m.q_diag ? (*m.q_diag)[j] : 0.0;
    col_key[j] = canon_number(sgn * m.c[j]) + "," + canon_number(sgn * q) + "," + canon_number(lo) + "," +
                 canon_number(hi) + "," + (integral ? "I" : "C");
  }

  std::vector<detail::CanonRow> rows(m.num_rows());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].sense = m.row_sense[i];
    rows[i].rhs = m.b[i];
  }
  for (const auto& t : m.a.entries)
    if (t.val != 0.0) rows[t.row].terms.emplace_back(t.col, t.val);
  for (auto& r : rows) {
    if (r.sense == RowSense::GE) {
      r.sense = RowSense::LE;
      r.rhs = -r.rhs;
      for (auto& [c, v] : r.terms) v = -v;
    } else if (r.sense == RowSense::EQ) {
      std::vector<double> pos, neg;
      for (auto& [c, v] : r.terms) {
        pos.push_back(v);
        neg.push_back(-v);
      }
      std::sort(pos.begin(), pos.end());
      std::sort(neg.begin(), neg.end());
      if (neg > pos || (neg == pos && r.rhs < 0)) {
        r.rhs = -r.rhs;
        for (auto& [c, v] : r.terms) v = -v;
      }
    }
  }
  auto sense_tag = [](RowSense s) { return s == RowSense::EQ ? std::string("E") : std::string("L"); };

  // Colour refinement: a row colour is its sense, rhs and the multiset of
  // (column colour, coefficient); a column colour is refined by the multiset
  // of (row colour, coefficient). Ranks come from sorted keys that start with
  // the previous colour, so refinement keeps the (cost, lb, ub, type) order.
  using Colors = std::vector<std::size_t>;
  auto rank = [](const std::vector<std::string>& keys) {
    std::vector<std::string> uniq = keys;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    Colors out(keys.size());
    for (std::size_t k = 0; k < keys.size(); ++k)
      out[k] = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), keys[k]) - uniq.begin());
    return std::make_pair(out, uniq.size());
  };
  auto padded = [](std::size_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%012zu", v);
    return std::string(buf);
  };
  auto refine = [&](Colors colors) {
    std::size_t count = 1 + (colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()));
    std::vector<std::string> row_key(rows.size()), next(n);
    for (;;) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> parts;
        for (auto [c, v] : rows[i].terms) parts.push_back(padded(colors[c]) + ":" + canon_number(v));
        std::sort(parts.begin(), parts.end());
        std::string k = sense_tag(rows[i].sense) + "," + canon_number(rows[i].rhs);
        for (const auto& s : parts) k += ";" + s;
        row_key[i] = std::move(k);
      }
      const auto row_color = rank(row_key).first;
      std::vector<std::vector<std::string>> incident(n);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (auto [c, v] : rows[i].terms) incident[c].push_back(padded(row_color[i]) + ":" + canon_number(v));
      for (std::size_t j = 0; j < n; ++j) {
        std::sort(incident[j].begin(), incident[j].end());
        next[j] = padded(colors[j]);
        for (const auto& s : incident[j]) next[j] += ";" + s;
      }
      auto [refined, c2] = rank(next);
      colors = std::move(refined);
      if (c2 == count) return std::make_pair(colors, count);
      count = c2;
    }
  };
  auto serialize = [&](const Colors& colors) {  // colors must be discrete
    CanonicalForm f;
    f.column_order.resize(n);
    for (std::size_t j = 0; j < n; ++j) f.column_order[colors[j]] = j;
    for (auto j : f.column_order) f.columns.push_back(col_key[j]);
    for (const auto& r : rows) {
      std::vector<std::pair<std::size_t, double>> t;
      for (auto [c, v] : r.terms) t.emplace_back(colors[c], v);
      std::sort(t.begin(), t.end());
      std::string s = sense_tag(r.sense) + "," + canon_number(r.rhs) + ",";
      for (auto [c, v] : t) s += " " + std::to_string(c) + ":" + canon_number(v);
      f.rows.push_back(std::move(s));
    }
    std::sort(f.rows.begin(), f.rows.end());
    f.bytes = "vars " + std::to_string(n) + "\n";
    for (const auto& c : f.columns) f.bytes += "col " + c + "\n";
    for (const auto& r : f.rows) f.bytes += "row " + r + "\n";
    return f;
  };

  // Individualize-and-refine over the first non-singleton cell, keeping the
  // smallest serialization. The number of explored leaves is capped; past the
  // cap only the first member of each cell is tried.
  constexpr std::size_t kLeafBudget = 256;
  std::size_t leaves = 0;
  std::optional<CanonicalForm> best;
  std::function<void(const Colors&)> search = [&](const Colors& start) {
    const auto [colors, count] = refine(start);
    if (count == n) {
      ++leaves;
      auto f = serialize(colors);
      if (!best || f.bytes < best->bytes) best = std::move(f);
      return;
    }
    std::vector<std::size_t> size(count, 0);
    for (auto c : colors) ++size[c];
    std::size_t cell = 0;
    while (size[cell] < 2) ++cell;
    for (std::size_t j = 0; j < n; ++j) {
      if (colors[j] != cell) continue;
      Colors split(n);
      for (std::size_t k = 0; k < n; ++k)
        split[k] = 2 * colors[k] + (colors[k] > cell || (colors[k] == cell && k != j) ? 1 : 0);
      search(rank([&] {
               std::vector<std::string> keys(n);
               for (std::size_t k = 0; k < n; ++k) keys[k] = padded(split[k]);
               return keys;
             }()).first);
      if (leaves >= kLeafBudget) break;
    }
  };
  search(rank(col_key).first);
  return *best;
}

// ---- isomorphism and mutual feasibility ----

inline const FeasibilityTolerance kMutualTolerance{1e-6, kScoreTolerance, 1e-5};

// ISOMORPHIC when canonical forms agree; MUTUAL_FEASIBLE when each model's
// optimum is feasible in the other, with variables matched either by position
// or by canonical column order; OPTIMUM_ONLY otherwise.
inline IsoClass check_isomorphism(const StandardFormModel& cand, const Point& cand_x, const StandardFormModel& gold,
                                  const Point& gold_x) {
  if (cand_x.x.size() != cand.num_vars() || gold_x.x.size() != gold.num_vars())
    throw data_error("check_isomorphism: solution points do not match their models");
  const auto cc = canonicalize(cand);
  const auto gc = canonicalize(gold);
  if (cc == gc) return IsoClass::Isomorphic;
  if (cand.num_vars() != gold.num_vars()) return IsoClass::OptimumOnly;
  auto both_ways = [&](const std::vector<std::size_t>& map) {  // gold column -> candidate column
    Point g_in_c{std::vector<double>(cand.num_vars())};
    Point c_in_g{std::vector<double>(gold.num_vars())};
    for (std::size_t j = 0; j < map.size(); ++j) {
      g_in_c.x[map[j]] = gold_x.x[j];
      c_in_g.x[j] = cand_x.x[map[j]];
    }
    return evaluate_point(cand, g_in_c, kMutualTolerance).feasible &&
           evaluate_point(gold, c_in_g, kMutualTolerance).feasible;
  };
  std::vector<std::size_t> identity(gold.num_vars());
  std::iota(identity.begin(), identity.end(), 0);
  if (both_ways(identity)) return IsoClass::MutualFeasible;
  std::vector<std::size_t> by_canon(gold.num_vars());
  for (std::size_t k = 0; k < by_canon.size(); ++k) by_canon[gc.column_order[k]] = cc.column_order[k];
  if (by_canon != identity && both_ways(by_canon)) return IsoClass::MutualFeasible;
  return IsoClass::OptimumOnly;
}

// ---- full evaluation of one submission ----

struct GoldReference {
  std::string instance_id;
  std::string category;
  StandardFormModel model;
  GroundTruth truth;
};

inline Verdict evaluate_submission(const CandidateSubmission& sub, const GoldReference& gold,
                                   double tol = kScoreTolerance) {
  Verdict v = score_candidate(sub, gold.truth.objective, tol);
  v.instance_id = gold.instance_id;
  v.category = gold.category;
  if (v.passed()) {
    if (sub.model && sub.result && sub.result->point && sub.result->point->x.size() == sub.model->num_vars()) {
      try {
        v.iso = check_isomorphism(*sub.model, *sub.result->point, gold.model, gold.truth.solution);
      } catch (const Error& e) {
        v.notes = std::string("isomorphism check skipped: ") + e.what();
      }
    } else {
      v.iso = IsoClass::OptimumOnly;
      v.notes = "no candidate point; isomorphism not checked";
    }
    return v;
  }
  v.failure = classify_failure(sub, gold.model);
  if (v.outcome == Outcome::WrongObjective)
    v.outcome = *v.failure == FailureClass::Binding ? Outcome::BindingError : Outcome::ModelingError;
  if (sub.model) {
    v.notes += (v.notes.empty() ? "" : "; ") + std::string("candidate ") + std::to_string(sub.model->num_vars()) +
               " vars / " + std::to_string(sub.model->num_rows()) + " rows, gold " +
               std::to_string(gold.model.num_vars()) + " / " + std::to_string(gold.model.num_rows());
  }
  return v;
}

// Solves the candidate model with the built-in solver when it carries no
// claimed result.
inline CandidateSubmission complete_submission(CandidateSubmission sub, const SolverConfig& cfg = {}) {
  if (sub.model && !sub.result) {
    try {
      sub.result = solve(*sub.model, cfg);
    } catch (const Error& e) {
      sub.error = std::string("candidate model rejected: ") + e.what();
      sub.model.reset();
    }
  }
  return sub;
}

// Submission file: {"instance_id", "model"?, "result"?}. A malformed file is
// an execution failure, not a harness error.
inline CandidateSubmission submission_from_json(const nlohmann::json& j, SubmissionSource src) {
  CandidateSubmission s;
  s.source = src;
  try {
    if (j.contains("instance_id")) s.instance_id = j.at("instance_id").get<std::string>();
    if (j.contains("error") && j.at("error").is_string()) s.error = j.at("error").get<std::string>();
    if (j.contains("response") && j.at("response").is_string()) s.response = j.at("response").get<std::string>();
    if (j.contains("model") && !j.at("model").is_null()) s.model = model_from_json(j.at("model"));
    if (s.model) require_valid(*s.model);
    if (j.contains("result") && !j.at("result").is_null())
      s.result = solve_result_from_json(j.at("result"), s.model ? s.model->num_vars() : 0);
  } catch (const std::exception& e) {
    s.model.reset();
    s.result.reset();
    s.error = std::string("unparsable submission: ") + e.what();
  }
  return s;
}

inline nlohmann::json submission_to_json(const CandidateSubmission& s) {
  nlohmann::json j{{"instance_id", s.instance_id}};
  if (s.model) j["model"] = model_to_json(*s.model);
  if (s.result) j["result"] = solve_result_to_json(*s.result);
  if (!s.error.empty()) j["error"] = s.error;
  if (!s.response.empty()) j["response"] = s.response;
  return j;
}

// Runs an external candidate generator: the prompt goes to stdin and stdout
// must hold a submission JSON. Crashes, timeouts and garbage are EXEC_ERROR.
inline CandidateSubmission run_candidate_adapter(const SolverAdapter& adapter, const std::string& prompt,
                                                 const std::string& instance_id) {
  CandidateSubmission s;
  s.instance_id = instance_id;
  s.source = SubmissionSource::Adapter;
  const auto proc = run_process(adapter.command, prompt, adapter.timeout_seconds);
  s.response = proc.out;
  if (proc.timed_out) s.error = "adapter timed out";
  else if (proc.signaled) s.error = "adapter terminated by signal";
  else if (proc.exit_code != 0) s.error = "adapter exited with code " + std::to_string(proc.exit_code);
  if (!s.error.empty()) return s;
  try {
    s = submission_from_json(nlohmann::json::parse(proc.out), SubmissionSource::Adapter);
  } catch (const nlohmann::json::exception& e) {
    s.error = std::string("adapter output is not JSON: ") + e.what();
  }
  s.instance_id = instance_id;
  s.response = proc.out;
  return s;
}

// ---- verdict records ----

inline nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json j{{"instance_id", v.instance_id},
                   {"category", v.category},
                   {"attempt", v.attempt},
                   {"outcome", to_string(v.outcome)}};
  j["rel_error"] = v.rel_error ? nlohmann::json(*v.rel_error) : nlohmann::json(nullptr);
  j["iso"] = v.iso ? nlohmann::json(to_string(*v.iso)) : nlohmann::json(nullptr);
  j["failure_class"] = v.failure ? nlohmann::json(to_string(*v.failure)) : nlohmann::json(nullptr);
  j["tokens"] = v.tokens ? nlohmann::json(*v.tokens) : nlohmann::json(nullptr);
  j["notes"] = v.notes;
  return j;
}

inline Verdict verdict_from_json(const nlohmann::json& j) {
  try {
    Verdict v;
    v.instance_id = j.at("instance_id").get<std::string>();
    v.category = j.value("category", "");
    v.attempt = j.value("attempt", 0);
    v.outcome = parse_outcome(j.at("outcome").get<std::string>());
    if (j.contains("rel_error") && !j.at("rel_error").is_null()) v.rel_error = j.at("rel_error").get<double>();
    if (j.contains("iso") && !j.at("iso").is_null()) v.iso = parse_iso(j.at("iso").get<std::string>());
    if (j.contains("failure_class") && !j.at("failure_class").is_null()) {
      const auto f = j.at("failure_class").get<std::string>();
      v.failure = f == "EXEC_ERROR" ? FailureClass::Exec
                  : f == "MODELING_ERROR" ? FailureClass::Modeling
                                          : FailureClass::Binding;
    }
    if (j.contains("tokens") && !j.at("tokens").is_null()) v.tokens = j.at("tokens").get<std::size_t>();
    v.notes = j.value("notes", "");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed verdict record: ") + e.what());
  }
}

// ---- aggregation ----

struct CategoryStats {
  std::size_t attempts = 0;
  std::size_t passes = 0;
  std::size_t instances = 0;       // instances with at least k attempts
  std::size_t solved_at_k = 0;     // of those, instances with a PASS among the first k
  std::map<std::string, double> composition;  // outcome -> share of attempts
  std::size_t token_sum = 0;
  std::size_t token_count = 0;  // attempts with a token measurement

  double accuracy() const { return attempts ? static_cast<double>(passes) / static_cast<double>(attempts) : 0.0; }
  std::optional<double> mean_tokens() const {
    if (!token_count) return std::nullopt;
    return static_cast<double>(token_sum) / static_cast<double>(token_count);
  }
  double pass_at_k() const {
    return instances ? static_cast<double>(solved_at_k) / static_cast<double>(instances) : 0.0;
  }
};

struct Report {
  std::size_t k = 1;
  std::map<std::string, CategoryStats> categories;
  CategoryStats overall;
  std::vector<std::string> warnings;
};

// Per-category accuracy over all attempts, pass@k over instances with at
// least k attempts (attempts ordered by their attempt number) and the share of
// each outcome.
inline Report aggregate(const std::vector<Verdict>& verdicts, std::size_t k) {
  if (k == 0) throw usage_error("pass@k needs k >= 1");
  Report rep;
  rep.k = k;
  std::map<std::string, std::vector<const Verdict*>> by_instance;
  for (const auto& v : verdicts) by_instance[v.category + "\x1f" + v.instance_id].push_back(&v);
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  std::map<std::string, std::size_t> overall_counts;
  for (auto& [key, list] : by_instance) {
    std::stable_sort(list.begin(), list.end(), [](const Verdict* a, const Verdict* b) { return a->attempt < b->attempt; });
    const std::string cat = list.front()->category;
    for (auto* s : {&rep.categories[cat], &rep.overall}) {
      s->attempts += list.size();
      for (auto* v : list) {
        s->passes += v->passed() ? 1 : 0;
        if (v->tokens) {
          s->token_sum += *v->tokens;
          ++s->token_count;
        }
      }
    }
    for (auto* v : list) {
      ++counts[cat][to_string(v->outcome)];
      ++overall_counts[to_string(v->outcome)];
    }
    if (list.size() < k) {
      rep.warnings.push_back("instance " + list.front()->instance_id + " has " + std::to_string(list.size()) +
                             " attempts, fewer than k = " + std::to_string(k) + "; excluded from pass@k");
      continue;
    }
    const bool solved = std::any_of(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k),
                                    [](const Verdict* v) { return v->passed(); });
    for (auto* s : {&rep.categories[cat], &rep.overall}) {
      ++s->instances;
      s->solved_at_k += solved ? 1 : 0;
    }
  }
  for (auto& [cat, s] : rep.categories)
    for (const auto& [o, c] : counts[cat]) s.composition[o] = static_cast<double>(c) / static_cast<double>(s.attempts);
  for (const auto& [o, c] : overall_counts)
    rep.overall.composition[o] = static_cast<double>(c) / static_cast<double>(rep.overall.attempts);
  return rep;
}

inline nlohmann::json report_to_json(const Report& r) {
  auto stats = [&](const CategoryStats& s) {
    return nlohmann::json{{"attempts", s.attempts},
                          {"accuracy", s.accuracy()},
                          {"instances", s.instances},
                          {"pass_at_k", s.pass_at_k()},
                          {"mean_tokens", s.mean_tokens() ? nlohmann::json(*s.mean_tokens()) : nlohmann::json(nullptr)},
                          {"composition", s.composition}};
  };
  nlohmann::json j{{"k", r.k}, {"overall", stats(r.overall)}, {"warnings", r.warnings}};
  j["categories"] = nlohmann::json::object();
  for (const auto& [c, s] : r.categories) j["categories"][c] = stats(s);
  return j;
}

inline std::string report_table(const Report& r) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-32s %8s %9s %9s %8s %8s %8s %8s %9s\n", "category", "attempts", "accuracy",
                ("pass@" + std::to_string(r.k)).c_str(), "exec", "model", "binding", "status", "tokens");
  out += buf;
  auto line = [&](const std::string& name, const CategoryStats& s) {
    auto share = [&](const char* o) {
      auto it = s.composition.find(o);
      return it == s.composition.end() ? 0.0 : it->second;
    };
    const auto tok = s.mean_tokens();
    std::snprintf(buf, sizeof buf, "%-32s %8zu %8.1f%% %8.1f%% %7.1f%% %7.1f%% %7.1f%% %7.1f%% %9s\n", name.c_str(),
                  s.attempts, 100 * s.accuracy(), 100 * s.pass_at_k(), 100 * share("EXEC_ERROR"),
                  100 * share("MODELING_ERROR"), 100 * share("BINDING_ERROR"), 100 * share("NONOPTIMAL_STATUS"),
                  tok ? std::to_string(static_cast<long long>(std::llround(*tok))).c_str() : "-");
    out += buf;
  };
  for (const auto& [c, s] : r.categories) line(c, s);
  line("overall", r.overall);
  return out;
}

}  // namespace optbind
