#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "optbind/generators.hpp"
#include "oracles.hpp"

using namespace optbind;

namespace {

WorldState transport_world(std::vector<double> supply, std::vector<double> demand, std::vector<double> cost) {
  WorldState w;
  w.category = Category::Transportation;
  w.dims = {{"num_sources", static_cast<std::int64_t>(supply.size())},
            {"num_destinations", static_cast<std::int64_t>(demand.size())}};
  w.params["costs"] = Array::matrix(supply.size(), demand.size(), cost);
  w.params["supplies"] = Array::vector(std::move(supply));
  w.params["demands"] = Array::vector(std::move(demand));
  return w;
}

WorldState jssp_world(std::size_t jobs, std::size_t machines, std::vector<double> seq, std::vector<double> p) {
  WorldState w;
  w.category = Category::Jssp;
  w.dims = {{"num_jobs", static_cast<std::int64_t>(jobs)}, {"num_machines", static_cast<std::int64_t>(machines)}};
  w.params["machine_sequence"] = Array::matrix(jobs, machines, std::move(seq));
  w.params["processing_times"] = Array::matrix(jobs, machines, std::move(p));
  return w;
}

double solve_world(const WorldState& w) {
  const auto r = solve(formulate(w).model);
  EXPECT_TRUE(r.optimal());
  return r.objective.value_or(NAN);
}

// Enumerates one job order per machine and schedules every operation as early
// as its job and machine predecessors allow. Orders that form a cycle are
// skipped. Returns the smallest makespan.
double jssp_by_enumeration(const WorldState& w) {
  const std::size_t nj = w.count("num_jobs"), nm = w.count("num_machines");
  const auto& seq = w.param("machine_sequence");
  const auto& p = w.param("processing_times");
  std::vector<std::vector<std::size_t>> orders(nm);
  for (auto& o : orders) {
    o.resize(nj);
    std::iota(o.begin(), o.end(), 0);
  }
  // operation id = j * nm + k
  auto pos_on = [&](std::size_t j, std::size_t m) {
    for (std::size_t k = 0; k < nm; ++k)
      if (static_cast<std::size_t>(seq(j, k)) == m) return k;
    return nm;
  };
  double best = INFINITY;
  std::function<void(std::size_t)> rec = [&](std::size_t m) {
    if (m == nm) {
      const std::size_t ops = nj * nm;
      std::vector<std::vector<std::size_t>> succ(ops);
      std::vector<int> indeg(ops, 0);
      auto edge = [&](std::size_t a, std::size_t b) {
        succ[a].push_back(b);
        ++indeg[b];
      };
      for (std::size_t j = 0; j < nj; ++j)
        for (std::size_t k = 0; k + 1 < nm; ++k) edge(j * nm + k, j * nm + k + 1);
      for (std::size_t mm = 0; mm < nm; ++mm)
        for (std::size_t r = 0; r + 1 < nj; ++r) {
          const auto a = orders[mm][r], b = orders[mm][r + 1];
          edge(a * nm + pos_on(a, mm), b * nm + pos_on(b, mm));
        }
      std::vector<double> start(ops, 0.0);
      std::queue<std::size_t> q;
      for (std::size_t o = 0; o < ops; ++o)
        if (indeg[o] == 0) q.push(o);
      std::size_t seen = 0;
      double span = 0.0;
      while (!q.empty()) {
        const auto o = q.front();
        q.pop();
        ++seen;
        const double end = start[o] + p(o / nm, o % nm);
        span = std::max(span, end);
        for (auto s : succ[o]) {
          start[s] = std::max(start[s], end);
          if (--indeg[s] == 0) q.push(s);
        }
      }
      if (seen == ops) best = std::min(best, span);
      return;
    }
    std::sort(orders[m].begin(), orders[m].end());
    do rec(m + 1);
    while (std::next_permutation(orders[m].begin(), orders[m].end()));
  };
  rec(0);
  return best;
}

// Event-driven M/M/s simulation; returns the share of arrivals that wait.
double simulate_wait_probability(int servers, double lambda, double mu, std::size_t customers, std::uint64_t seed) {
  Rng rng(seed);
  auto expo = [&](double rate) { return -std::log(1.0 - rng.uniform()) / rate; };
  std::vector<double> free_at(static_cast<std::size_t>(servers), 0.0);
  double t = 0.0;
  std::size_t waited = 0;
  for (std::size_t i = 0; i < customers; ++i) {
    t += expo(lambda);
    auto it = std::min_element(free_at.begin(), free_at.end());
    const double begin = std::max(t, *it);
    if (begin > t) ++waited;
    *it = begin + expo(mu);
  }
  return static_cast<double>(waited) / static_cast<double>(customers);
}

bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

TEST(Generators, TransportationThreeByThree) {
  const auto p = generate_instance(Category::Transportation, Dims{{"num_sources", 3}, {"num_destinations", 3}}, 1);
  EXPECT_EQ(p.model.num_vars(), 9u);
  ASSERT_EQ(p.model.num_rows(), 6u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(p.model.row_sense[i], RowSense::LE);
  for (std::size_t i = 3; i < 6; ++i) EXPECT_EQ(p.model.row_sense[i], RowSense::EQ);
  for (auto t : p.model.vartype) EXPECT_EQ(t, VarType::Continuous);
  EXPECT_EQ(p.truth.status, TruthStatus::Optimal);
}

TEST(Generators, TransportationCaseStudyShape) {
  std::vector<double> cost(42);
  for (std::size_t k = 0; k < cost.size(); ++k) cost[k] = 5.0 + static_cast<double>(k % 11);
  const auto w = transport_world({94, 47, 50, 55, 67, 37, 69}, {14, 47, 21, 70, 72, 58}, cost);
  const auto f = formulate(w);
  EXPECT_EQ(f.model.num_vars(), 42u);
  EXPECT_EQ(f.model.num_rows(), 13u);
}

TEST(Generators, TransportationOneByOne) {
  EXPECT_DOUBLE_EQ(solve_world(transport_world({5}, {3}, {2})), 6.0);
}

TEST(Generators, TransportationTwoByTwoMatchesVertexOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = generate_instance(Category::Transportation, Dims{{"num_sources", 2}, {"num_destinations", 2}}, seed);
    // every shipment is bounded by the largest supply
    double cap = 0.0;
    for (double v : p.world.param("supplies").data) cap = std::max(cap, v);
    const std::vector<double> lb(4, 0.0), ub(4, cap);
    const auto ref = oracle::lp_by_vertices(p.model, lb, ub);
    ASSERT_TRUE(ref.has_value());
    EXPECT_NEAR(p.truth.objective, *ref, 1e-6 * std::max(1.0, std::abs(*ref))) << "seed " << seed;
  }
}

TEST(Generators, ResourceAllocationAnchorIsFeasible) {
  const auto p = generate_instance(Category::ResourceAllocation, Dims{{"num_products", 2}, {"num_resources", 1}}, 7);
  const Point anchor{p.world.param("x_anchor").data};
  EXPECT_TRUE(evaluate_point(p.model, anchor, 1e-9).feasible);
  EXPECT_EQ(p.model.num_rows(), 1u);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto q = generate_instance(Category::ResourceAllocation, Tier::Small, seed);
    const Point a{q.world.param("x_anchor").data};
    ASSERT_TRUE(evaluate_point(q.model, a, 1e-9).feasible) << "seed " << seed;
    for (const auto& r : validate_model(q.model)) ADD_FAILURE() << r.message;
    // maximization: the optimum is at least as good as the anchor
    EXPECT_GE(q.truth.objective, objective_value(q.model, a.x) - 1e-9);
    for (double s : q.world.param("slack").data) EXPECT_GE(s, 0.5);
  }
}

TEST(Generators, JsspTwoByTwoMatchesEnumeration) {
  const auto p = generate_instance(Category::Jssp, Dims{{"num_jobs", 2}, {"num_machines", 2}}, 3);
  EXPECT_DOUBLE_EQ(p.truth.objective, jssp_by_enumeration(p.world));
}

TEST(Generators, JsspThreeByThreeMatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = generate_instance(Category::Jssp, Dims{{"num_jobs", 3}, {"num_machines", 3}}, seed);
    EXPECT_NEAR(p.truth.objective, jssp_by_enumeration(p.world), 1e-6) << "seed " << seed;
  }
}

TEST(Generators, JsspSmallCases) {
  EXPECT_DOUBLE_EQ(solve_world(jssp_world(1, 2, {0, 1}, {3, 4})), 7.0);
  EXPECT_DOUBLE_EQ(solve_world(jssp_world(2, 1, {0, 0}, {3, 4})), 7.0);
}

TEST(Generators, JsspRejectsBadRouting) {
  EXPECT_THROW(formulate(jssp_world(1, 2, {0, 0}, {3, 4})), Error);
}

TEST(Formulas, EuclideanCosts) {
  const auto c = derive_euclidean_costs({{0, 0}}, {{3, 4}, {0, 0}}, 1.0);
  EXPECT_DOUBLE_EQ(c[0][0], 5.0);
  EXPECT_DOUBLE_EQ(c[0][1], 0.0);
  const auto d = derive_euclidean_costs({{0, 0}, {1, 2}}, {{3, 4}, {7, -1}}, 2.0);
  const auto e = derive_euclidean_costs({{0, 0}, {1, 2}}, {{3, 4}, {7, -1}}, 1.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(d[i][j], 2.0 * e[i][j]);
  EXPECT_THROW(derive_euclidean_costs({}, {{0, 0}}, 1.0), Error);
}

TEST(Formulas, PowerLossCoefficient) {
  EXPECT_DOUBLE_EQ(power_loss_coefficient(1, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(power_loss_coefficient(1, 1, 2), 0.25);
  EXPECT_THROW(power_loss_coefficient(1, 1, 0), Error);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double v = power_loss_coefficient(rng.uniform(0.1, 50), rng.uniform(0.1, 2), rng.uniform(10, 500));
    EXPECT_NE(v * 1e6, v);
  }
}

TEST(Formulas, ErlangCClosedForms) {
  EXPECT_DOUBLE_EQ(erlang_c_wait_probability(1, 0.5), 0.5);
  // M/M/2 at a = 0.5: (a^2/2) / ((1 - a/2)(1 + a) + a^2/2) = 0.125 / 1.25
  EXPECT_NEAR(erlang_c_wait_probability(2, 0.5), 0.1, 1e-12);
  EXPECT_EQ(erlang_c_wait_probability(3, 0.0), 0.0);
  EXPECT_THROW(erlang_c_wait_probability(2, 2.0), Error);
  EXPECT_THROW(erlang_c_wait_probability(0, 0.1), Error);
}

TEST(Formulas, ErlangCMatchesSimulation) {
  struct Case {
    int s;
    double a;
  };
  for (auto [s, a] : {Case{2, 0.5}, Case{3, 2.0}, Case{5, 4.0}}) {
    const std::size_t n = 400000;
    const double sim = simulate_wait_probability(s, a, 1.0, n, 99);
    const double exact = erlang_c_wait_probability(s, a);
    // queue samples are correlated; allow a generous band
    EXPECT_NEAR(sim, exact, 0.02) << "s=" << s << " a=" << a;
  }
}

TEST(Formulas, ErlangCMonotone) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const int s = static_cast<int>(rng.integer(1, 30));
    const double a = rng.uniform(0.01, s - 0.01);
    const double c = erlang_c_wait_probability(s, a);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
    EXPECT_LT(erlang_c_wait_probability(s + 1, a), c);
    const double a2 = std::min(a * 1.01, s - 1e-3);
    if (a2 > a) EXPECT_GT(erlang_c_wait_probability(s, a2), c);
  }
}

class EveryCategory : public ::testing::TestWithParam<Category> {};

TEST_P(EveryCategory, GeneratesVerifiedInstances) {
  const auto c = GetParam();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = generate_instance(c, Tier::Small, seed);
    ASSERT_EQ(p.truth.status, TruthStatus::Optimal);
    EXPECT_TRUE(evaluate_point(p.model, p.truth.solution, 1e-6).feasible);
    EXPECT_EQ(p.var_names.size(), p.model.num_vars());
    EXPECT_EQ(p.row_names.size(), p.model.num_rows());
    EXPECT_NEAR(objective_value(p.model, p.truth.solution.x), p.truth.objective, 1e-9);
    // the schema fields alone rebuild the same model
    WorldState bare = p.world;
    bare.params.clear();
    for (const auto& f : category_def(c).schema.fields) bare.params[f.name] = p.world.param(f.name);
    EXPECT_TRUE(formulate(bare).model == p.model);
  }
}

TEST_P(EveryCategory, SeedDeterminism) {
  const auto c = GetParam();
  for (std::uint64_t seed : {0u, 17u}) {
    const auto a = instance_to_json(generate_instance(c, Tier::Small, seed)).dump();
    const auto b = instance_to_json(generate_instance(c, Tier::Small, seed)).dump();
    EXPECT_EQ(a, b);
  }
  EXPECT_NE(instance_to_json(generate_instance(c, Tier::Small, 1)).dump(),
            instance_to_json(generate_instance(c, Tier::Small, 2)).dump());
}

TEST_P(EveryCategory, JsonRoundTrip) {
  const auto p = generate_instance(GetParam(), Tier::Small, 4);
  const auto q = instance_from_json(nlohmann::json::parse(instance_to_json(p).dump()));
  EXPECT_TRUE(q.world == p.world);
  EXPECT_TRUE(q.model == p.model);
  EXPECT_EQ(q.truth.objective, p.truth.objective);
  EXPECT_EQ(q.truth.solution.x, p.truth.solution.x);
}

TEST_P(EveryCategory, SchemaTextHasNoDigits) {
  const auto& s = category_def(GetParam()).schema;
  for (const auto& d : s.dims) EXPECT_FALSE(has_digit(d)) << d;
  for (const auto& f : s.fields) {
    EXPECT_FALSE(has_digit(f.name)) << f.name;
    EXPECT_FALSE(has_digit(f.note)) << f.note;
    EXPECT_FALSE(has_digit(shape_string(f))) << f.name;
  }
}

TEST_P(EveryCategory, ArraysMatchDims) {
  const auto p = generate_instance(GetParam(), Tier::Small, 9);
  EXPECT_NO_THROW(check_against_schema(p.world, category_def(GetParam()).schema));
}

TEST_P(EveryCategory, RejectsOutOfRangeDims) {
  const auto c = GetParam();
  auto dims = sample_dims(c, Tier::Small, 0);
  const auto& r = category_def(c).ranges.front();
  dims[r.name] = r.max + 1;
  EXPECT_THROW(generate_instance(c, dims, 0), Error);
  dims[r.name] = r.min - 1;
  EXPECT_THROW(generate_instance(c, dims, 0), Error);
}

INSTANTIATE_TEST_SUITE_P(All, EveryCategory, ::testing::ValuesIn(kAllCategories),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Generators, LargeTierOnlyForMarkedCategories) {
  for (auto c : kAllCategories) {
    if (has_large_tier(c)) EXPECT_NO_THROW(sample_dims(c, Tier::Large, 0));
    else EXPECT_THROW(sample_dims(c, Tier::Large, 0), Error);
  }
}

TEST(Generators, DeskDimsRespectCrossChecks) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto ra = sample_dims(Category::ResourceAllocation, Tier::Small, seed);
    EXPECT_LE(ra.at("num_resources"), ra.at("num_products"));
    const auto vr = sample_dims(Category::Vrptw, Tier::Small, seed);
    EXPECT_LE(vr.at("num_vehicles"), vr.at("num_customers"));
  }
}

TEST(Generators, InstanceDirectoryLayout) {
  const auto p = generate_instance(Category::Transportation, Tier::Small, 12);
  EXPECT_EQ(instance_dir_name(p), "transportation_small_12");
  const auto root = std::filesystem::temp_directory_path() / "optbind_gen_test";
  std::filesystem::remove_all(root);
  const auto dir = write_instance(p, root);
  EXPECT_TRUE(std::filesystem::exists(dir / "instance.json"));
  const auto q = load_instance(dir);
  EXPECT_TRUE(q.model == p.model);
  std::filesystem::remove_all(root);
}
