#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "optbind/binding.hpp"
#include "optbind/evaluation.hpp"

using namespace optbind;

namespace {

BindingExtraction two_var() {
  BindingExtraction e;
  e.goal = Sense::Max;
  e.variables = {{"x", VarType::Continuous, 0, 10, 3}, {"y", VarType::Integer, 0, kInf, 2}};
  e.constraints = {{"cap", {{"x", 1}, {"y", 1}}, RowSense::LE, 4.5}};
  return e;
}

// Minimum cost of shipping every demand with supplies as capacities, by
// successive shortest paths on unit-free integer amounts.
double min_cost_flow(const std::vector<double>& supply, const std::vector<double>& demand,
                     const std::vector<std::vector<double>>& cost) {
  const std::size_t S = supply.size(), D = demand.size(), N = S + D + 2, src = S + D, snk = S + D + 1;
  struct Arc {
    std::size_t to;
    double cap, cost;
    std::size_t rev;
  };
  std::vector<std::vector<Arc>> g(N);
  auto add = [&](std::size_t a, std::size_t b, double cap, double c) {
    g[a].push_back({b, cap, c, g[b].size()});
    g[b].push_back({a, 0, -c, g[a].size() - 1});
  };
  for (std::size_t i = 0; i < S; ++i) add(src, i, supply[i], 0);
  for (std::size_t j = 0; j < D; ++j) add(S + j, snk, demand[j], 0);
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j < D; ++j) add(i, S + j, 1e18, cost[i][j]);
  double need = 0, total = 0;
  for (double d : demand) need += d;
  while (need > 0) {
    std::vector<double> dist(N, std::numeric_limits<double>::infinity());
    std::vector<std::pair<std::size_t, std::size_t>> prev(N);
    dist[src] = 0;
    for (std::size_t it = 0; it < N; ++it)
      for (std::size_t u = 0; u < N; ++u)
        if (dist[u] < 1e300)
          for (std::size_t k = 0; k < g[u].size(); ++k)
            if (g[u][k].cap > 0 && dist[u] + g[u][k].cost < dist[g[u][k].to] - 1e-12) {
              dist[g[u][k].to] = dist[u] + g[u][k].cost;
              prev[g[u][k].to] = {u, k};
            }
    if (dist[snk] > 1e300) return std::numeric_limits<double>::quiet_NaN();
    double push = need;
    for (auto v = snk; v != src; v = prev[v].first) push = std::min(push, g[prev[v].first][prev[v].second].cap);
    for (auto v = snk; v != src; v = prev[v].first) {
      auto& a = g[prev[v].first][prev[v].second];
      a.cap -= push;
      g[a.to][a.rev].cap += push;
    }
    need -= push;
    total += push * dist[snk];
  }
  return total;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("optbind_bind_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Extraction, WellFormedHasNoViolations) {
  auto e = two_var();
  EXPECT_TRUE(validate_extraction(e).empty());
}

TEST(Extraction, UnknownVariable) {
  auto e = two_var();
  e.constraints[0].coeffs.emplace_back("x9", 1.0);
  const auto v = validate_extraction(e);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("unknown variable"), std::string::npos);
}

TEST(Extraction, DuplicateName) {
  auto e = two_var();
  e.variables.push_back({" x ", VarType::Continuous, 0, 1, 0});
  const auto v = validate_extraction(e);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("duplicate"), std::string::npos);
  EXPECT_EQ(e.variables[2].name, "x");
}

TEST(Extraction, OtherViolations) {
  auto e = two_var();
  e.variables[0].lb = 11;
  e.constraints[0].coeffs.emplace_back("y", 2.0);
  e.constraints[0].rhs = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(validate_extraction(e).size(), 3u);
  EXPECT_THROW(build_from_extraction(e), Error);
}

TEST(Extraction, BuildsInDeclarationOrder) {
  const auto m = build_from_extraction(two_var());
  EXPECT_EQ(m.sense, Sense::Max);
  EXPECT_EQ(m.c, (std::vector<double>{3, 2}));
  EXPECT_EQ(m.vartype[1], VarType::Integer);
  const auto r = solve(m);
  ASSERT_TRUE(r.optimal());
  // y integer: best is x = 4.5, y = 0 (13.5) versus x = 0.5, y = 4 (9.5)
  EXPECT_NEAR(*r.objective, 13.5, 1e-9);
}

TEST(Extraction, NoConstraintsUsesBounds) {
  BindingExtraction e;
  e.goal = Sense::Min;
  e.variables = {{"a", VarType::Continuous, -2, 5, 1.5}, {"b", VarType::Integer, 1.5, 7, -1}};
  const auto r = solve(build_from_extraction(e));
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(*r.objective, -3 - 7, 1e-9);
}

TEST(Extraction, JsonRoundTrip) {
  const auto e = two_var();
  EXPECT_EQ(parse_extraction(compact_serialize(e)), e);
  EXPECT_EQ(parse_extraction(pretty_serialize(e)), e);
  BindingExtraction empty;
  empty.variables = {{"z", VarType::Binary, 0, 1, 1}};
  EXPECT_EQ(compact_serialize(empty).find(' '), std::string::npos);
  EXPECT_EQ(parse_extraction(compact_serialize(empty)), empty);
}

TEST(Extraction, AcceptsLooseNumerals) {
  const auto e = parse_extraction(R"({"goal":"MINIMIZE","variables":[{"name":"x","lb":"0.50","ub":null,"obj":"2.0"}],
    "constraints":[{"coeffs":{"x":"1.000"},"sense":">=","rhs":3}]})");
  EXPECT_EQ(e.variables[0].lb, 0.5);
  EXPECT_EQ(e.variables[0].ub, kInf);
  EXPECT_EQ(e.constraints[0].coeffs[0].second, 1.0);
  EXPECT_THROW(parse_extraction(R"({"goal":"MINIMIZE","variables":[{"name":"x","obj":"two"}]})"), Error);
  EXPECT_THROW(parse_extraction(R"({"goal":"UP","variables":[]})"), Error);
  EXPECT_THROW(parse_extraction("{"), Error);
}

TEST(Extraction, TranscriptIngestion) {
  const auto e = two_var();
  const auto t = "Here is the data:\n```json\n" + pretty_serialize(e) + "\n```\nDone.";
  EXPECT_EQ(ingest_extraction_transcript(t), e);
  EXPECT_THROW(ingest_extraction_transcript("no json at all"), Error);
}

TEST(Extraction, CompactIsMuchSmaller) {
  const auto p = generate_instance(Category::Transportation, Dims{{"num_sources", 10}, {"num_destinations", 10}}, 4);
  const auto e = extraction_from_model(p.model, p.var_names, p.row_names);
  const auto compact = compact_serialize(e), pretty = pretty_serialize(e);
  EXPECT_LE(static_cast<double>(estimate_tokens(compact)), 0.4 * static_cast<double>(estimate_tokens(pretty)));
  // measured character ratio against four-space indentation is about 0.44
  EXPECT_LT(static_cast<double>(compact.size()), 0.45 * static_cast<double>(pretty.size()));
  EXPECT_EQ(parse_extraction(compact), e);
}

TEST(Extraction, PerturbedCoefficientIsBindingError) {
  const auto p = generate_instance(Category::ResourceAllocation, Tier::Small, 12);
  auto e = extraction_from_model(p.model, p.var_names, p.row_names);
  e.constraints[0].coeffs[0].second *= 1.5;
  e.constraints[0].rhs *= 0.5;
  CandidateSubmission s;
  s.model = build_from_extraction(e);
  s = complete_submission(s);
  const auto v = evaluate_submission(s, {"ra", "resource_allocation", p.model, p.truth});
  EXPECT_EQ(v.outcome, Outcome::BindingError);
}

TEST(Extraction, DistinctCoefficientsGiveDistinctModels) {
  const auto p = generate_instance(Category::Transportation, Tier::Small, 2);
  const auto e = extraction_from_model(p.model, p.var_names, p.row_names);
  const auto base = canonicalize(build_from_extraction(e)).bytes;
  for (std::size_t i = 0; i < e.constraints.size(); ++i) {
    auto f = e;
    f.constraints[i].rhs += 1.0;
    EXPECT_NE(canonicalize(build_from_extraction(f)).bytes, base) << i;
  }
}

class GroundTruthClosure : public ::testing::TestWithParam<Category> {};

TEST_P(GroundTruthClosure, ExtractBuildSolvePasses) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto p = generate_instance(GetParam(), Tier::Small, seed);
    const auto text = compact_serialize(extraction_from_model(p.model, p.var_names, p.row_names));
    const auto m = build_from_extraction(parse_extraction(text));
    EXPECT_TRUE(m == p.model);
    CandidateSubmission s;
    s.model = m;
    s = complete_submission(s);
    const auto v = evaluate_submission(s, {"g", to_string(GetParam()), p.model, p.truth});
    EXPECT_EQ(v.outcome, Outcome::Pass) << "seed " << seed << " " << v.notes;
    EXPECT_EQ(*v.rel_error, 0.0);
    EXPECT_EQ(*v.iso, IsoClass::Isomorphic);
  }
}

INSTANTIATE_TEST_SUITE_P(Categories, GroundTruthClosure,
                         ::testing::Values(Category::ResourceAllocation, Category::Transportation, Category::Jssp),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(BindBuilders, MatchGeneratorModels) {
  const auto dir = scratch("builders");
  for (auto c : {Category::Transportation, Category::Jssp, Category::ResourceAllocation}) {
    const auto p = generate_instance(c, Tier::Small, 21);
    const auto b = externalize_bind(p, dir / to_string(c));
    const auto m = c == Category::Transportation ? build_transportation_from_bind(b.data_path)
                   : c == Category::Jssp         ? build_jssp_from_bind(b.data_path)
                                                 : build_resource_allocation_from_bind(b.data_path);
    EXPECT_EQ(canonicalize(m).bytes, canonicalize(p.model).bytes);
    const auto r = solve(m);
    EXPECT_EQ(check_isomorphism(m, *r.point, p.model, p.truth.solution), IsoClass::Isomorphic);
  }
  std::filesystem::remove_all(dir);
}

TEST(BindBuilders, CaseStudyTransportation) {
  WorldState w;
  w.category = Category::Transportation;
  w.dims = {{"num_sources", 7}, {"num_destinations", 6}};
  const std::vector<double> supply = {94, 47, 50, 55, 67, 37, 69}, demand = {14, 47, 21, 70, 72, 58};
  Rng rng(2024);
  std::vector<std::vector<double>> cost(7, std::vector<double>(6));
  std::vector<double> flat;
  for (auto& row : cost)
    for (auto& c : row) {
      c = round_to(rng.uniform(2, 20));
      flat.push_back(c);
    }
  w.params["supplies"] = Array::vector(supply);
  w.params["demands"] = Array::vector(demand);
  w.params["costs"] = Array::matrix(7, 6, flat);
  const auto dir = scratch("case");
  const auto file = dir / "bind_data.json";
  write_text(file, bind_data_json(w).dump(1));
  const auto m = build_transportation_from_bind(file);
  EXPECT_EQ(m.num_vars(), 42u);
  EXPECT_EQ(m.num_rows(), 13u);
  const auto r = solve(m);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(*r.objective, min_cost_flow(supply, demand, cost), 1e-6 * std::abs(*r.objective));

  // supplies replaced by a uniform 100, as in the failing transcription
  auto wrong = w;
  wrong.params["supplies"] = Array::vector(std::vector<double>(7, 100));
  wrong.params["demands"] = Array::vector(std::vector<double>(6, 100));
  const auto rw = solve(formulate(wrong).model);
  ASSERT_TRUE(rw.optimal());
  EXPECT_GT(relative_error(*rw.objective, *r.objective), kScoreTolerance);

  // a truncated demands array is rejected
  auto j = bind_data_json(w);
  j["demands"].erase(j["demands"].size() - 1);
  write_text(file, j.dump());
  EXPECT_THROW(build_transportation_from_bind(file), Error);
  std::filesystem::remove_all(dir);
}
