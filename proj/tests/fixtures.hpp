#pragma once

// Model fixtures shared by the unit tests and the acceptance run.

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "optbind/evaluation.hpp"
#include "optbind/numfmt.hpp"
#include "optbind/rng.hpp"
#include "optbind/solver.hpp"

namespace fixtures {

using namespace optbind;

inline StandardFormModel random_lp(Rng& rng, bool integers) {
  const auto n = static_cast<std::size_t>(rng.integer(1, integers ? 4 : 5));
  const auto m = static_cast<std::size_t>(rng.integer(1, integers ? 4 : 5));
  ModelBuilder b(rng.bernoulli(0.5) ? Sense::Min : Sense::Max);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = static_cast<double>(rng.integer(-3, 1));
    const double hi = lo + static_cast<double>(rng.integer(1, 6));
    const bool is_int = integers && rng.bernoulli(0.6);
    b.add_var(round_to(rng.uniform(-5, 5)), is_int ? lo + 0.3 * rng.bernoulli(0.3) : lo, hi,
              is_int ? VarType::Integer : VarType::Continuous);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t j = 0; j < n; ++j)
      if (rng.bernoulli(0.8)) row.emplace_back(j, round_to(rng.uniform(-4, 4)));
    const int s = static_cast<int>(rng.integer(0, 2));
    b.add_row(row, s == 0 ? RowSense::LE : s == 1 ? RowSense::GE : RowSense::EQ, round_to(rng.uniform(-6, 6)));
  }
  return b.build();
}

// Applies column permutation `cp` (new position -> old column) and row
// permutation `rp` (new row -> old row).
inline StandardFormModel permute(const StandardFormModel& m, const std::vector<std::size_t>& cp,
                          const std::vector<std::size_t>& rp) {
  StandardFormModel o = m;
  std::vector<std::size_t> cinv(cp.size()), rinv(rp.size());
  for (std::size_t k = 0; k < cp.size(); ++k) cinv[cp[k]] = k;
  for (std::size_t k = 0; k < rp.size(); ++k) rinv[rp[k]] = k;
  for (std::size_t k = 0; k < cp.size(); ++k) {
    o.c[k] = m.c[cp[k]];
    o.lb[k] = m.lb[cp[k]];
    o.ub[k] = m.ub[cp[k]];
    o.vartype[k] = m.vartype[cp[k]];
    if (m.q_diag) (*o.q_diag)[k] = (*m.q_diag)[cp[k]];
  }
  for (std::size_t k = 0; k < rp.size(); ++k) {
    o.row_sense[k] = m.row_sense[rp[k]];
    o.b[k] = m.b[rp[k]];
  }
  o.a.entries.clear();
  for (const auto& t : m.a.entries) o.a.entries.push_back({rinv[t.row], cinv[t.col], t.val});
  std::sort(o.a.entries.begin(), o.a.entries.end(),
            [](const Triplet& x, const Triplet& y) { return std::tie(x.row, x.col) < std::tie(y.row, y.col); });
  return o;
}

inline std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& g) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), g);
  return p;
}

// min sum c_j x_j, x_j >= 1 (12 rows), sum x <= 100; optimum is sum c_j.
inline StandardFormModel twelve_by_thirteen(double last_cost) {
  StandardFormModel m;
  m.c.assign(11, 48.0);
  m.c.push_back(last_cost);
  m.lb.assign(12, 0.0);
  m.ub.assign(12, 10.0);
  m.vartype.assign(12, VarType::Continuous);
  m.a.rows = 13;
  m.a.cols = 12;
  for (std::size_t j = 0; j < 12; ++j) {
    m.a.entries.push_back({j, j, 1.0});
    m.row_sense.push_back(RowSense::GE);
    m.b.push_back(1.0);
  }
  for (std::size_t j = 0; j < 12; ++j) m.a.entries.push_back({12, j, 1.0});
  m.row_sense.push_back(RowSense::LE);
  m.b.push_back(100.0);
  return m;
}

// max 2x + y  s.t.  row0 on x, x + y <= 4, x in [0, 10], y in [0, 10]
inline StandardFormModel single_cap(double coef, RowSense s, double rhs) {
  StandardFormModel m;
  m.sense = Sense::Max;
  m.c = {2.0, 1.0};
  m.lb = {0.0, 0.0};
  m.ub = {10.0, 10.0};
  m.vartype = {VarType::Continuous, VarType::Continuous};
  m.a.rows = 2;
  m.a.cols = 2;
  m.a.entries = {{0, 0, coef}, {1, 0, 1.0}, {1, 1, 1.0}};
  m.row_sense = {s, RowSense::LE};
  m.b = {rhs, 4.0};
  return m;
}

inline CandidateSubmission solved(const StandardFormModel& m) {
  CandidateSubmission s;
  s.instance_id = "case";
  s.model = m;
  return complete_submission(s);
}

inline GoldReference gold_of(const StandardFormModel& m) {
  const auto r = solve(m);
  if (!r.optimal()) throw std::runtime_error("fixture model is not solvable");
  GoldReference g;
  g.instance_id = "case";
  g.category = "fixture";
  g.model = m;
  g.truth.objective = *r.objective;
  g.truth.solution = *r.point;
  return g;
}

// 10 binding errors, 10 structural mismatches and 10 broken adapters, each
// against the 12-variable gold model.
inline std::vector<std::pair<CandidateSubmission, Outcome>> thirty_case_fixture() {
  std::vector<std::pair<CandidateSubmission, Outcome>> cases;
  for (int k = 0; k < 10; ++k) {
    auto m = twelve_by_thirteen(53.41);
    if (k < 5) m.c[static_cast<std::size_t>(k)] += 1.0 + k;
    else m.b[static_cast<std::size_t>(k)] = 2.0 + 0.5 * k;
    cases.emplace_back(solved(m), Outcome::BindingError);
  }
  for (int k = 0; k < 10; ++k) {
    auto m = twelve_by_thirteen(53.41);
    if (k % 2 == 0) {  // extra variable
      m.c.push_back(1.0 + k);
      m.lb.push_back(1.0);
      m.ub.push_back(2.0);
      m.vartype.push_back(VarType::Continuous);
      m.a.cols = 13;
      m.a.entries.push_back({12, 12, 1.0});
    } else {  // extra row
      m.a.rows = 14;
      m.a.entries.push_back({13, static_cast<std::size_t>(k), 1.0});
      m.row_sense.push_back(RowSense::GE);
      m.b.push_back(1.5);
    }
    cases.emplace_back(solved(m), Outcome::ModelingError);
  }
  const std::vector<std::string> commands = {"exit 1", "exit 2", "kill -9 $$", "echo not json", "echo '{\"model\": 5}'",
                                             "sleep 5", "echo '[1,2'", "true", "exit 139", "echo '{\"model\": {}}'"};
  for (const auto& cmd : commands) {
    auto s = run_candidate_adapter({cmd, 0.5}, "prompt", "case");
    cases.emplace_back(s, Outcome::ExecError);
  }
  return cases;
}

}  // namespace fixtures
