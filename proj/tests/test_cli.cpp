#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "json.hpp"
#include "optbind/adapter.hpp"
#include "optbind/generators.hpp"

namespace fs = std::filesystem;
using namespace optbind;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("optbind_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run cli(const std::string& args, const fs::path& cwd) {
  const auto r = run_process("cd '" + cwd.string() + "' && '" OPTBIND_CLI "' " + args + " 2>&1", "", 120);
  return {r.exit_code, r.out};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      out[fs::relative(e.path(), root).generic_string()] = read_text(e.path());
  return out;
}

nlohmann::json report(const fs::path& dir) { return read_json(dir / "report.json"); }

}  // namespace

TEST(Cli, GenerateIsDeterministic) {
  const auto tmp = scratch("determinism");
  ASSERT_EQ(cli("generate --category all --count 1 --seed 11 --out a", tmp).code, 0);
  const auto first = snapshot(tmp / "a");
  ASSERT_EQ(cli("generate --category all --count 1 --seed 11 --out a", tmp).code, 0);
  ASSERT_EQ(cli("generate --category all --count 1 --seed 11 --jobs 3 --out b", tmp).code, 0);
  EXPECT_EQ(snapshot(tmp / "a"), first);
  EXPECT_EQ(snapshot(tmp / "b"), first);
  EXPECT_EQ(first.size(), 12u * 4);
  const auto man = read_json(tmp / "a" / "manifest.json");
  EXPECT_EQ(man.at("instances").size(), 12u);
  EXPECT_EQ(man.at("artifacts").size(), 48u);
  EXPECT_EQ(man.at("seeds"), nlohmann::json({11}));
}

TEST(Cli, ExitCodes) {
  const auto tmp = scratch("exit");
  EXPECT_EQ(cli("generate --category jssp --tier large --out x", tmp).code, 1);
  EXPECT_EQ(cli("generate --category nope --out x", tmp).code, 1);
  EXPECT_EQ(cli("generate --out x --no-such-flag", tmp).code, 1);
  EXPECT_EQ(cli("", tmp).code, 1);
  EXPECT_EQ(cli("evaluate --instances missing --submissions s.jsonl --out y", tmp).code, 2);
  write_text(tmp / "bad.jsonl", "{not json\n");
  ASSERT_EQ(cli("generate --category transportation --out g", tmp).code, 0);
  EXPECT_EQ(cli("evaluate --instances g --submissions bad.jsonl --out y", tmp).code, 2);
  EXPECT_EQ(cli("evaluate --instances g --out y", tmp).code, 1);
  EXPECT_EQ(cli("--help", tmp).code, 0);
}

TEST(Cli, GroundTruthSubmissionsScorePerfectly) {
  const auto tmp = scratch("truth");
  ASSERT_EQ(cli("generate --category all --count 2 --seed 3 --out g", tmp).code, 0);
  for (const auto& e : fs::directory_iterator(tmp / "g")) {
    if (!e.is_directory()) continue;
    const auto id = e.path().filename().string();
    // bind-build reads extractions of linear models only
    const bool linear = id.rfind("power_transmission", 0) != 0;
    const auto r = cli("bind-build --instance g/" + id + (linear ? " --from-truth" : "") + " --out subs", tmp);
    ASSERT_EQ(r.code, 0) << id << "\n" << r.out;
  }
  const auto r = cli("evaluate --instances g --submissions subs --k 2 --out ev", tmp);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rep = report(tmp / "ev");
  EXPECT_DOUBLE_EQ(rep.at("overall").at("accuracy").get<double>(), 1.0);
  EXPECT_EQ(rep.at("overall").at("attempts").get<int>(), 24);
  EXPECT_EQ(rep.at("categories").size(), 12u);
  EXPECT_NE(r.out.find("pass@2"), std::string::npos);
  const auto again = cli("report --verdicts ev/verdicts.jsonl --k 2 --out rep", tmp);
  EXPECT_EQ(again.code, 0);
  EXPECT_EQ(read_text(tmp / "rep" / "report.txt"), read_text(tmp / "ev" / "report.txt"));
}

TEST(Cli, EmptySubmissionsGiveEmptyReport) {
  const auto tmp = scratch("empty");
  ASSERT_EQ(cli("generate --category resource_allocation --out g", tmp).code, 0);
  write_text(tmp / "none.jsonl", "");
  const auto r = cli("evaluate --instances g --submissions none.jsonl --k 5 --out ev", tmp);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("pass@5"), std::string::npos);
  EXPECT_EQ(report(tmp / "ev").at("overall").at("attempts").get<int>(), 0);
  EXPECT_EQ(read_text(tmp / "ev" / "verdicts.jsonl"), "");
}

TEST(Cli, OrphanSubmissionsWarn) {
  const auto tmp = scratch("orphan");
  ASSERT_EQ(cli("generate --category resource_allocation --out g", tmp).code, 0);
  write_text(tmp / "s.jsonl", R"({"instance_id": "ghost", "error": "nothing"})" "\n");
  const auto r = cli("evaluate --instances g --submissions s.jsonl --out ev", tmp);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("orphan"), std::string::npos);
}

TEST(Cli, BindBuildFromDataMatchesTruth) {
  const auto tmp = scratch("bind");
  ASSERT_EQ(cli("generate --category transportation --seed 4 --out g", tmp).code, 0);
  const auto r = cli("bind-build --instance g/transportation_small_4/ --out b", tmp);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("rel_error 0"), std::string::npos) << r.out;
  const auto ev = cli("evaluate --instances g --submissions b --mode bind --out ev", tmp);
  EXPECT_EQ(ev.code, 0);
  EXPECT_DOUBLE_EQ(report(tmp / "ev").at("overall").at("accuracy").get<double>(), 1.0);
}

TEST(Cli, AdapterFailuresAreExecErrors) {
  const auto tmp = scratch("adapter");
  ASSERT_EQ(cli("generate --category resource_allocation --count 2 --out g", tmp).code, 0);
  const auto r = cli("evaluate --instances g --adapter 'exit 3' --k 2 --out ev", tmp);
  EXPECT_EQ(r.code, 0);
  const auto rep = report(tmp / "ev");
  EXPECT_EQ(rep.at("overall").at("attempts").get<int>(), 4);
  EXPECT_DOUBLE_EQ(rep.at("overall").at("accuracy").get<double>(), 0.0);
  EXPECT_NE(read_text(tmp / "ev" / "verdicts.jsonl").find("EXEC_ERROR"), std::string::npos);
}

TEST(Cli, RulerOracleScoresOne) {
  const auto tmp = scratch("ruler");
  ASSERT_EQ(cli("ruler generate --lengths 1024,2048 --n 3 --oracle --out r", tmp).code, 0);
  const auto r = cli("ruler score --samples r/samples.jsonl --transcripts r/oracle_transcripts.jsonl --out s", tmp);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto sheet = read_json(tmp / "s" / "score_sheet.json");
  EXPECT_EQ(sheet.dump().find("\"accuracy\":0"), std::string::npos);
  EXPECT_NE(r.out.find("100.0%"), std::string::npos);
  EXPECT_EQ(cli("ruler generate --lengths 1000 --out r2", tmp).code, 1);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto tmp = scratch("config");
  write_text(tmp / "run.toml", "[generate]\ncategory = \"resource_allocation\"\ncount = 3\nseed = 2\n");
  ASSERT_EQ(cli("--config run.toml generate --count 1 --out g", tmp).code, 0);
  const auto man = read_json(tmp / "g" / "manifest.json");
  EXPECT_EQ(man.at("instances"), nlohmann::json({"resource_allocation_small_2"}));
  EXPECT_NE(man.at("config").get<std::string>().find("count=1"), std::string::npos);
}

TEST(Cli, WritesOnlyUnderOut) {
  const auto tmp = scratch("confine");
  ASSERT_EQ(cli("generate --category resource_allocation --out g", tmp).code, 0);
  ASSERT_EQ(cli("bind-build --instance g/resource_allocation_small_0 --from-truth --out b", tmp).code, 0);
  ASSERT_EQ(cli("evaluate --instances g --submissions b --out ev", tmp).code, 0);
  ASSERT_EQ(cli("ruler generate --lengths 1024 --n 1 --out r", tmp).code, 0);
  std::set<std::string> top;
  for (const auto& e : fs::directory_iterator(tmp)) top.insert(e.path().filename().string());
  EXPECT_EQ(top, (std::set<std::string>{"g", "b", "ev", "r"}));
}
