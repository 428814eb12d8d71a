#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "optbind/evaluation.hpp"
#include "optbind/generators.hpp"
#include "fixtures.hpp"

using namespace optbind;
using namespace fixtures;

namespace {

CandidateSubmission with_result(SolveStatus st, std::optional<double> z) {
  CandidateSubmission s;
  s.instance_id = "x";
  SolveResult r;
  r.status = st;
  r.objective = z;
  s.result = r;
  return s;
}

}  // namespace

TEST(Score, ExactMatchPasses) {
  const auto v = score_candidate(with_result(SolveStatus::Optimal, 581.41), 581.41);
  EXPECT_EQ(v.outcome, Outcome::Pass);
  EXPECT_EQ(*v.rel_error, 0.0);
}

TEST(Score, CaseStudyValuesFail) {
  const auto v = score_candidate(with_result(SolveStatus::Optimal, 580.06), 581.41);
  EXPECT_FALSE(v.passed());
  EXPECT_NEAR(*v.rel_error, 1.35 / 581.41, 1e-12);
  EXPECT_NEAR(*v.rel_error, 2.32e-3, 1e-5);
}

TEST(Score, SmallPerturbationPasses) {
  const auto v = score_candidate(with_result(SolveStatus::Optimal, 100.005), 100.0);
  EXPECT_EQ(v.outcome, Outcome::Pass);
  EXPECT_NEAR(*v.rel_error, 5e-5, 1e-12);
}

TEST(Score, BoundaryIsInclusive) {
  // 1 / 10000 rounds to the same double as the literal 1e-4
  ASSERT_EQ(1.0 / 10000.0, 1e-4);
  EXPECT_TRUE(score_candidate(with_result(SolveStatus::Optimal, 10001.0), 10000.0).passed());
  EXPECT_TRUE(score_candidate(with_result(SolveStatus::Optimal, 9999.0), 10000.0).passed());
  EXPECT_FALSE(score_candidate(with_result(SolveStatus::Optimal, 10001.0001), 10000.0).passed());
}

TEST(Score, ZeroTruthUsesFloor) {
  EXPECT_TRUE(score_candidate(with_result(SolveStatus::Optimal, 0.0), 0.0).passed());
  EXPECT_FALSE(score_candidate(with_result(SolveStatus::Optimal, 1e-6), 0.0).passed());
  EXPECT_TRUE(score_candidate(with_result(SolveStatus::Optimal, 1e-14), 0.0).passed());
}

TEST(Score, NonoptimalNeverPasses) {
  for (auto st : {SolveStatus::Infeasible, SolveStatus::Unbounded, SolveStatus::IterLimit})
    for (std::optional<double> z : {std::optional<double>{}, std::optional<double>{581.41}}) {
      const auto v = score_candidate(with_result(st, z), 581.41);
      EXPECT_EQ(v.outcome, Outcome::NonoptimalStatus);
    }
}

TEST(Score, MissingResultIsExecError) {
  CandidateSubmission s;
  s.error = "boom";
  const auto v = score_candidate(s, 1.0);
  EXPECT_EQ(v.outcome, Outcome::ExecError);
  EXPECT_EQ(v.notes, "boom");
  EXPECT_THROW(score_candidate(with_result(SolveStatus::Optimal, 1.0), 1.0, 0.0), Error);
}

TEST(Score, UnparsableSubmissionIsExecError) {
  const auto s = submission_from_json(nlohmann::json{{"instance_id", "a"}, {"model", {{"c", "oops"}}}},
                                      SubmissionSource::StructuredFile);
  EXPECT_FALSE(s.model);
  EXPECT_FALSE(s.error.empty());
  EXPECT_EQ(score_candidate(s, 3.0).outcome, Outcome::ExecError);
}

TEST(Classify, CaseStudyIsBindingError) {
  const auto gold = gold_of(twelve_by_thirteen(53.41));
  EXPECT_NEAR(gold.truth.objective, 581.41, 1e-9);
  const auto cand = solved(twelve_by_thirteen(52.06));
  ASSERT_TRUE(cand.result && cand.result->optimal());
  EXPECT_NEAR(*cand.result->objective, 580.06, 1e-9);
  const auto v = evaluate_submission(cand, gold);
  EXPECT_EQ(v.outcome, Outcome::BindingError);
  EXPECT_EQ(*v.failure, FailureClass::Binding);
  EXPECT_GT(*v.rel_error, kScoreTolerance);
}

TEST(Classify, CountMismatchIsModelingError) {
  auto m = twelve_by_thirteen(40.0);
  m.c.pop_back();
  m.lb.pop_back();
  m.ub.pop_back();
  m.vartype.pop_back();
  m.a.cols = 11;
  std::erase_if(m.a.entries, [](const Triplet& t) { return t.col == 11; });
  m.a.rows = 12;
  std::erase_if(m.a.entries, [](const Triplet& t) { return t.row == 11; });
  for (auto& t : m.a.entries)
    if (t.row == 12) t.row = 11;
  m.row_sense.erase(m.row_sense.begin() + 11);
  m.b.erase(m.b.begin() + 11);
  EXPECT_EQ(m.num_vars(), 11u);
  const auto v = evaluate_submission(solved(m), gold_of(twelve_by_thirteen(53.41)));
  EXPECT_EQ(v.outcome, Outcome::ModelingError);
}

TEST(Classify, AdapterCrashIsExecError) {
  const auto s = run_candidate_adapter({"exit 7", 10}, "prompt", "inst");
  EXPECT_FALSE(s.model);
  const auto v = evaluate_submission(s, gold_of(twelve_by_thirteen(53.41)));
  EXPECT_EQ(v.outcome, Outcome::ExecError);
  EXPECT_EQ(*v.failure, FailureClass::Exec);
}

// Thirty fixtures: ten with a mis-bound coefficient, ten with the wrong
// structure, ten that never produce a model.
TEST(Classify, ThirtyCaseFixture) {
  const auto gold = gold_of(twelve_by_thirteen(53.41));
  const auto cases = thirty_case_fixture();
  ASSERT_EQ(cases.size(), 30u);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto v = evaluate_submission(cases[i].first, gold);
    EXPECT_EQ(v.outcome, cases[i].second) << "case " << i << ": " << v.notes;
    ASSERT_TRUE(v.failure.has_value());
  }
}

TEST(Canonical, GeRowBecomesLe) {
  const auto ge = single_cap(-1.0, RowSense::GE, -9.34);
  const auto le = single_cap(1.0, RowSense::LE, 9.34);
  EXPECT_EQ(canonicalize(ge).bytes, canonicalize(le).bytes);
}

TEST(Canonical, IntegerBoundsTightened) {
  auto a = single_cap(1.0, RowSense::LE, 9.0);
  a.vartype[0] = VarType::Integer;
  a.lb[0] = 0.2;
  a.ub[0] = 2.9;
  auto b = a;
  b.lb[0] = 1.0;
  b.ub[0] = 2.0;
  EXPECT_EQ(canonicalize(a).bytes, canonicalize(b).bytes);
  auto c = a;
  c.vartype[0] = VarType::Binary;
  c.lb[0] = 0.0;
  c.ub[0] = 1.0;
  auto d = a;
  d.lb[0] = 0.0;
  d.ub[0] = 1.0;
  EXPECT_EQ(canonicalize(c).bytes, canonicalize(d).bytes);
}

TEST(Canonical, MaxBecomesMin) {
  auto a = single_cap(1.0, RowSense::LE, 9.0);
  auto b = a;
  b.sense = Sense::Min;
  b.c = {-2.0, -1.0};
  EXPECT_EQ(canonicalize(a).bytes, canonicalize(b).bytes);
}

TEST(Canonical, DistinguishesRealChanges) {
  const auto a = twelve_by_thirteen(53.41);
  EXPECT_NE(canonicalize(a).bytes, canonicalize(twelve_by_thirteen(52.06)).bytes);
  auto b = a;
  b.b[3] = 1.5;
  EXPECT_NE(canonicalize(a).bytes, canonicalize(b).bytes);
  auto c = a;
  c.a.entries.back().val = 2.0;
  EXPECT_NE(canonicalize(a).bytes, canonicalize(c).bytes);
}

TEST(Canonical, PermutationInvariantOnGeneratedModels) {
  std::mt19937_64 g(11);
  for (auto cat : kAllCategories) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p = generate_instance(cat, Tier::Small, seed);
      const auto base = canonicalize(p.model).bytes;
      for (int t = 0; t < 4; ++t) {
        const auto q = permute(p.model, shuffled(p.model.num_vars(), g), shuffled(p.model.num_rows(), g));
        EXPECT_EQ(canonicalize(q).bytes, base) << to_string(cat) << " seed " << seed;
      }
    }
  }
}

TEST(Canonical, SymmetricColumnsStillInvariant) {
  // every column identical up to its row: colour refinement alone cannot split them
  StandardFormModel m;
  const std::size_t n = 6;
  m.c.assign(n, 1.0);
  m.lb.assign(n, 0.0);
  m.ub.assign(n, 1.0);
  m.vartype.assign(n, VarType::Binary);
  m.a.rows = n;
  m.a.cols = n;
  for (std::size_t i = 0; i < n; ++i) {
    m.a.entries.push_back({i, i, 1.0});
    m.a.entries.push_back({i, (i + 1) % n, 1.0});
    m.row_sense.push_back(RowSense::GE);
    m.b.push_back(1.0);
  }
  std::mt19937_64 g(3);
  const auto base = canonicalize(m).bytes;
  for (int t = 0; t < 20; ++t) EXPECT_EQ(canonicalize(permute(m, shuffled(n, g), shuffled(n, g))).bytes, base);
}

TEST(Isomorphism, GoldAgainstItself) {
  const auto m = twelve_by_thirteen(53.41);
  const auto r = solve(m);
  EXPECT_EQ(check_isomorphism(m, *r.point, m, *r.point), IsoClass::Isomorphic);
}

TEST(Isomorphism, RewrittenRowIsMutualFeasible) {
  const auto gold = single_cap(-5.4, RowSense::GE, -9.34);
  const auto cand = single_cap(1.0, RowSense::LE, 1.7296);
  const auto rg = solve(gold);
  const auto rc = solve(cand);
  ASSERT_TRUE(rg.optimal() && rc.optimal());
  EXPECT_NE(canonicalize(gold).bytes, canonicalize(cand).bytes);
  EXPECT_LE(relative_error(*rc.objective, *rg.objective), kScoreTolerance);
  EXPECT_EQ(check_isomorphism(cand, *rc.point, gold, *rg.point), IsoClass::MutualFeasible);
}

TEST(Isomorphism, RedundantRowIsMutualFeasible) {
  const auto gold = twelve_by_thirteen(53.41);
  auto cand = gold;
  // x0 + x1 <= 30 is implied by x <= 10
  cand.a.rows = 14;
  cand.a.entries.push_back({13, 0, 1.0});
  cand.a.entries.push_back({13, 1, 1.0});
  cand.row_sense.push_back(RowSense::LE);
  cand.b.push_back(30.0);
  const auto rg = solve(gold);
  const auto rc = solve(cand);
  EXPECT_EQ(check_isomorphism(cand, *rc.point, gold, *rg.point), IsoClass::MutualFeasible);
}

TEST(Isomorphism, DifferentRegionSameOptimum) {
  const auto gold = twelve_by_thirteen(53.41);
  auto cand = gold;
  for (auto& u : cand.ub) u = 1.0;  // optimum unchanged, gold optimum still feasible, but cand point too
  cand.lb[0] = 1.0;
  const auto rg = solve(gold);
  const auto rc = solve(cand);
  EXPECT_EQ(check_isomorphism(cand, *rc.point, gold, *rg.point), IsoClass::MutualFeasible);
  // a different variable count cannot be compared pointwise
  auto wide = gold;
  wide.c.push_back(0.0);
  wide.lb.push_back(0.0);
  wide.ub.push_back(1.0);
  wide.vartype.push_back(VarType::Continuous);
  wide.a.cols = 13;
  const auto rw = solve(wide);
  EXPECT_EQ(check_isomorphism(wide, *rw.point, gold, *rg.point), IsoClass::OptimumOnly);
}

TEST(Isomorphism, MissingPointIsAnError) {
  const auto m = twelve_by_thirteen(53.41);
  EXPECT_THROW(check_isomorphism(m, Point{}, m, *solve(m).point), Error);
}

TEST(Isomorphism, PermutedCopiesAreIsomorphic) {
  std::mt19937_64 g(5);
  for (auto cat : kAllCategories) {
    const auto p = generate_instance(cat, Tier::Small, 9);
    const auto cp = shuffled(p.model.num_vars(), g);
    const auto q = permute(p.model, cp, shuffled(p.model.num_rows(), g));
    Point x{std::vector<double>(cp.size())};
    for (std::size_t k = 0; k < cp.size(); ++k) x.x[k] = p.truth.solution.x[cp[k]];
    EXPECT_EQ(check_isomorphism(q, x, p.model, p.truth.solution), IsoClass::Isomorphic) << to_string(cat);
  }
}

TEST(Evaluate, GroundTruthResubmissionPasses) {
  for (auto cat : kAllCategories)
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto p = generate_instance(cat, Tier::Small, seed);
      GoldReference gold{"i", to_string(cat), p.model, p.truth};
      CandidateSubmission s;
      s.model = p.model;
      SolveResult r;
      r.status = SolveStatus::Optimal;
      r.objective = p.truth.objective;
      r.point = p.truth.solution;
      s.result = r;
      const auto v = evaluate_submission(s, gold);
      EXPECT_EQ(v.outcome, Outcome::Pass);
      EXPECT_EQ(*v.rel_error, 0.0);
      EXPECT_EQ(*v.iso, IsoClass::Isomorphic);
    }
}

TEST(Evaluate, SubmissionJsonRoundTrip) {
  auto s = solved(twelve_by_thirteen(53.41));
  s.instance_id = "abc";
  const auto back = submission_from_json(submission_to_json(s), SubmissionSource::StructuredFile);
  ASSERT_TRUE(back.model && back.result);
  EXPECT_TRUE(*back.model == *s.model);
  EXPECT_EQ(*back.result->objective, *s.result->objective);
  EXPECT_EQ(back.instance_id, "abc");
}

TEST(Evaluate, AdapterOutputIsParsed) {
  auto s = solved(twelve_by_thirteen(53.41));
  const auto dir = std::filesystem::temp_directory_path() / "optbind_eval_adapter";
  std::filesystem::create_directories(dir);
  const auto file = dir / "sub.json";
  std::ofstream(file) << submission_to_json(s).dump();
  const auto got = run_candidate_adapter({"cat > /dev/null; cat " + file.string(), 10}, "the prompt", "inst");
  EXPECT_EQ(got.source, SubmissionSource::Adapter);
  ASSERT_TRUE(got.model);
  EXPECT_TRUE(evaluate_submission(got, gold_of(twelve_by_thirteen(53.41))).passed());
  std::filesystem::remove_all(dir);
}

TEST(Verdicts, JsonRoundTrip) {
  Verdict v;
  v.instance_id = "t1";
  v.category = "transportation";
  v.attempt = 2;
  v.outcome = Outcome::BindingError;
  v.rel_error = 0.25;
  v.failure = FailureClass::Binding;
  v.notes = "n";
  const auto b = verdict_from_json(nlohmann::json::parse(verdict_to_json(v).dump()));
  EXPECT_EQ(b.outcome, v.outcome);
  EXPECT_EQ(*b.rel_error, 0.25);
  EXPECT_EQ(*b.failure, FailureClass::Binding);
  EXPECT_EQ(b.attempt, 2);
  EXPECT_FALSE(b.iso);
  EXPECT_THROW(verdict_from_json(nlohmann::json{{"outcome", "PASS"}}), Error);
  EXPECT_THROW(verdict_from_json(nlohmann::json{{"instance_id", "a"}, {"outcome", "MAYBE"}}), Error);
}

namespace {
Verdict make(const std::string& cat, const std::string& id, int attempt, Outcome o) {
  Verdict v;
  v.category = cat;
  v.instance_id = id;
  v.attempt = attempt;
  v.outcome = o;
  return v;
}
}  // namespace

TEST(Aggregate, PassAtTwo) {
  const auto r = aggregate({make("a", "i", 0, Outcome::ExecError), make("a", "i", 1, Outcome::Pass)}, 2);
  EXPECT_DOUBLE_EQ(r.categories.at("a").pass_at_k(), 1.0);
  EXPECT_DOUBLE_EQ(r.categories.at("a").accuracy(), 0.5);
}

TEST(Aggregate, AllFail) {
  const auto r = aggregate({make("a", "i", 0, Outcome::ModelingError), make("a", "j", 0, Outcome::NonoptimalStatus)}, 1);
  EXPECT_DOUBLE_EQ(r.overall.pass_at_k(), 0.0);
  EXPECT_DOUBLE_EQ(r.overall.accuracy(), 0.0);
}

TEST(Aggregate, OnlyFirstKAttemptsCount) {
  const auto r = aggregate({make("a", "i", 2, Outcome::Pass), make("a", "i", 0, Outcome::ExecError),
                            make("a", "i", 1, Outcome::BindingError)},
                           2);
  EXPECT_DOUBLE_EQ(r.overall.pass_at_k(), 0.0);
}

TEST(Aggregate, ShortInstancesExcludedWithWarning) {
  const auto r = aggregate({make("a", "i", 0, Outcome::Pass), make("a", "j", 0, Outcome::ExecError),
                            make("a", "j", 1, Outcome::ExecError)},
                           2);
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.overall.instances, 1u);
  EXPECT_EQ(r.overall.attempts, 3u);
  EXPECT_THROW(aggregate({}, 0), Error);
}

TEST(Aggregate, CompositionIsAPartition) {
  std::mt19937_64 g(2);
  const std::vector<Outcome> all = {Outcome::Pass, Outcome::ExecError, Outcome::ModelingError, Outcome::BindingError,
                                    Outcome::NonoptimalStatus};
  std::vector<Verdict> vs;
  for (int i = 0; i < 300; ++i)
    vs.push_back(make(std::string(1, static_cast<char>('a' + i % 4)), std::to_string(i / 3), i % 3, all[g() % all.size()]));
  const auto r = aggregate(vs, 3);
  for (const auto& [c, s] : r.categories) {
    double sum = 0;
    for (const auto& [o, share] : s.composition) sum += share;
    EXPECT_NEAR(sum, 1.0, 1e-12) << c;
  }
  const auto table = report_table(r);
  EXPECT_NE(table.find("overall"), std::string::npos);
  EXPECT_EQ(report_to_json(r)["k"], 3);
}
