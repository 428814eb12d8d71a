// optbind command-line front end.

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "optbind/binding.hpp"
#include "optbind/documents.hpp"
#include "optbind/evaluation.hpp"
#include "optbind/generators.hpp"
#include "optbind/ruler.hpp"

namespace fs = std::filesystem;
using namespace optbind;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Records what a command wrote; serialized as manifest.json in its output
// directory.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config;
  fs::path out;
  std::string started_at = utc_now();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> instances;
  std::vector<std::string> artifacts;
  std::vector<std::string> failures;

  void add(const fs::path& p) { artifacts.push_back(fs::relative(p, out).generic_string()); }

  void write() {
    std::sort(artifacts.begin(), artifacts.end());
    json j{{"command", command},   {"argv", argv},           {"config", config},
           {"output_dir", out.generic_string()},             {"seeds", seeds},
           {"instances", instances}, {"artifacts", artifacts}, {"failures", failures},
           {"started_at", started_at}, {"finished_at", utc_now()}};
    write_text(out / "manifest.json", j.dump(1) + "\n");
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Dims parse_dims(const std::string& s) {
  Dims d;
  for (const auto& kv : split_list(s)) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw usage_error("--dims expects name=value pairs, got '" + kv + "'");
    const auto v = parse_number(kv.substr(eq + 1));
    if (!v || *v != std::floor(*v)) throw usage_error("dimension '" + kv + "' is not an integer");
    d[kv.substr(0, eq)] = static_cast<std::int64_t>(*v);
  }
  return d;
}

// Runs fn(i) for i in [0, n) on `jobs` threads; the first exception is
// rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::max<std::size_t>(1, jobs); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<json> read_records(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      const auto ext = e.path().extension();
      if (e.is_regular_file() && (ext == ".json" || ext == ".jsonl") && e.path().filename() != "manifest.json")
        files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw data_error("not found: " + path.string());
  }
  std::vector<json> out;
  for (const auto& f : files) {
    const auto text = read_text(f);
    if (f.extension() == ".jsonl") {
      std::istringstream in(text);
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
          throw data_error(f.string() + ":" + std::to_string(n) + ": " + e.what());
        }
      }
    } else {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error& e) {
        throw data_error(f.string() + ": " + e.what());
      }
      if (j.is_array())
        for (auto& x : j) out.push_back(std::move(x));
      else
        out.push_back(std::move(j));
    }
  }
  return out;
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  write_text(path, text);
}

// ---- generate ----

struct GenerateArgs {
  std::string category = "all";
  std::size_t count = 1;
  std::string tier = "small";
  std::uint64_t seed = 0;
  std::string dims;
  std::string out;
  std::size_t jobs = 1;
};

int cmd_generate(const GenerateArgs& a, Manifest& man) {
  const Tier tier = parse_tier(a.tier);
  std::vector<Category> cats;
  if (a.category == "all") {
    for (auto c : kAllCategories)
      if (tier == Tier::Small || has_large_tier(c)) cats.push_back(c);
  } else {
    cats.push_back(parse_category(a.category));
  }
  for (auto c : cats)
    if (tier == Tier::Large && !has_large_tier(c))
      throw usage_error(std::string("category ") + to_string(c) + " has no large tier");
  if (a.count == 0) throw usage_error("--count must be at least 1");
  const auto fixed = a.dims.empty() ? std::optional<Dims>{} : std::optional<Dims>{parse_dims(a.dims)};
  if (fixed && cats.size() != 1) throw usage_error("--dims needs a single --category");

  struct Job {
    Category c;
    std::uint64_t seed;
  };
  std::vector<Job> work;
  for (auto c : cats)
    for (std::size_t i = 0; i < a.count; ++i) work.push_back({c, a.seed + i});
  for (std::size_t i = 0; i < a.count; ++i) man.seeds.push_back(a.seed + i);

  std::vector<std::optional<std::string>> ids(work.size());
  std::vector<std::vector<fs::path>> files(work.size());
  std::vector<std::string> errors(work.size());
  parallel_for(work.size(), a.jobs, [&](std::size_t i) {
    try {
      const auto p = fixed ? generate_instance(work[i].c, *fixed, work[i].seed, {}, tier)
                           : generate_instance(work[i].c, tier, work[i].seed);
      const auto dir = write_instance(p, man.out);
      render_documents(p, dir);
      ids[i] = instance_dir_name(p);
      for (const auto& e : fs::directory_iterator(dir)) files[i].push_back(e.path());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Usage) throw;
      errors[i] = std::string(to_string(work[i].c)) + " seed " + std::to_string(work[i].seed) + ": " + e.what();
    }
  });
  std::size_t ok = 0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (ids[i]) {
      ++ok;
      man.instances.push_back(*ids[i]);
      for (const auto& f : files[i]) man.add(f);
    } else {
      man.failures.push_back(errors[i]);
    }
  }
  std::cout << "generated " << ok << " of " << work.size() << " instances in " << man.out.string() << "\n";
  for (const auto& f : man.failures) std::cerr << "error: " << f << "\n";
  return man.failures.empty() ? 0 : 2;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string instances;
  std::string submissions;
  std::string adapter;
  std::string mode = "table";
  std::size_t k = 1;
  std::size_t attempts = 0;
  double timeout = 120;
  double tol = kScoreTolerance;
  std::string out;
};

struct LoadedInstance {
  ProblemInstance p;
  fs::path dir;
  std::string prompt;
};

std::map<std::string, LoadedInstance> load_instances(const fs::path& root, const std::string& mode,
                                                     std::vector<std::string>& warnings) {
  if (!fs::is_directory(root)) throw data_error("instances directory not found: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::exists(e.path() / "instance.json")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  std::map<std::string, LoadedInstance> out;
  std::set<std::string> fallback;
  for (const auto& d : dirs) {
    LoadedInstance li{load_instance(d), d, ""};
    std::vector<std::string> names = mode == "bind"    ? std::vector<std::string>{"bind_prompt.txt"}
                                     : mode == "prose" ? std::vector<std::string>{"prose.txt", "templated.txt"}
                                                       : std::vector<std::string>{"templated.txt", "prose.txt"};
    for (std::size_t k = 0; k < names.size(); ++k)
      if (fs::exists(d / names[k])) {
        li.prompt = read_text(d / names[k]);
        if (k > 0 && fallback.insert(to_string(li.p.world.category)).second)
          warnings.push_back(std::string("no ") + mode + " document for " + to_string(li.p.world.category) +
                             "; using " + names[k]);
        break;
      }
    if (li.prompt.empty()) li.prompt = mode == "bind" ? "" : primary_document(li.p);
    out.emplace(d.filename().string(), std::move(li));
  }
  return out;
}

int cmd_evaluate(const EvaluateArgs& a, Manifest& man) {
  if (a.mode != "prose" && a.mode != "table" && a.mode != "bind")
    throw usage_error("--mode must be prose, table or bind");
  if (a.submissions.empty() == a.adapter.empty()) throw usage_error("give exactly one of --submissions or --adapter");
  if (a.k == 0) throw usage_error("--k must be at least 1");
  std::vector<std::string> warnings;
  const auto inst = load_instances(a.instances, a.mode, warnings);

  std::vector<std::pair<CandidateSubmission, int>> subs;
  if (!a.submissions.empty()) {
    std::map<std::string, int> next_attempt;
    for (const auto& j : read_records(a.submissions)) {
      auto s = submission_from_json(j, SubmissionSource::StructuredFile);
      int attempt = j.contains("attempt") && j.at("attempt").is_number_integer() ? j.at("attempt").get<int>()
                                                                                 : next_attempt[s.instance_id];
      next_attempt[s.instance_id] = std::max(next_attempt[s.instance_id], attempt + 1);
      subs.emplace_back(std::move(s), attempt);
    }
  } else {
    const std::size_t n = a.attempts ? a.attempts : a.k;
    for (const auto& [id, li] : inst)
      for (std::size_t t = 0; t < n; ++t)
        subs.emplace_back(run_candidate_adapter({a.adapter, a.timeout}, li.prompt, id), static_cast<int>(t));
  }

  std::vector<Verdict> verdicts;
  for (auto& [s, attempt] : subs) {
    auto it = inst.find(s.instance_id);
    if (it == inst.end()) {
      warnings.push_back("orphan submission for unknown instance '" + s.instance_id + "' excluded");
      continue;
    }
    const auto& li = it->second;
    GoldReference gold{s.instance_id, to_string(li.p.world.category), li.p.model, li.p.truth};
    auto v = evaluate_submission(complete_submission(std::move(s)), gold, a.tol);
    v.attempt = attempt;
    v.tokens = estimate_tokens(li.prompt) + estimate_tokens(s.response);
    verdicts.push_back(std::move(v));
  }
  std::vector<json> rows;
  for (const auto& v : verdicts) rows.push_back(verdict_to_json(v));
  write_jsonl(man.out / "verdicts.jsonl", rows);
  auto rep = aggregate(verdicts, a.k);
  for (auto& w : rep.warnings) warnings.push_back(w);
  rep.warnings = warnings;
  write_text(man.out / "report.json", report_to_json(rep).dump(1) + "\n");
  const auto table = report_table(rep);
  write_text(man.out / "report.txt", table);
  for (const auto& f : {"verdicts.jsonl", "report.json", "report.txt"}) man.add(man.out / f);
  for (const auto& [id, li] : inst) man.instances.push_back(id);
  std::cout << table;
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

// ---- ruler ----

struct RulerArgs {
  std::string tasks = "single_key,multi_key,multi_value,aggregation";
  std::string lengths = "1024,2048,4096,8192,16384,32768";
  std::size_t n = 200;
  std::uint64_t seed = 0;
  std::string corpus;
  bool oracle = false;
  std::string samples;
  std::string transcripts;
  std::string out;
};

int cmd_ruler_generate(const RulerArgs& a, Manifest& man) {
  std::vector<RulerTask> tasks;
  for (const auto& t : split_list(a.tasks)) tasks.push_back(parse_ruler_task(t));
  std::vector<std::size_t> lengths;
  for (const auto& l : split_list(a.lengths)) {
    const auto v = parse_number(l);
    if (!v || *v < 0) throw usage_error("bad length '" + l + "'");
    lengths.push_back(static_cast<std::size_t>(*v));
  }
  const auto corpus = a.corpus.empty() ? synthetic_corpus(a.seed) : load_corpus(a.corpus);
  std::ofstream samples(man.out / "samples.jsonl", std::ios::binary);
  std::ofstream oracle;
  if (a.oracle) oracle.open(man.out / "oracle_transcripts.jsonl", std::ios::binary);
  const auto n = ruler_batch(tasks, lengths, a.n, a.seed, corpus, [&](const RulerSample& s) {
    samples << sample_to_json(s).dump() << "\n";
    if (a.oracle) {
      std::string r;
      for (const auto& x : s.answers) r += x + "\n";
      oracle << json{{"id", s.id}, {"response", r}}.dump() << "\n";
    }
  });
  if (!samples) throw internal_error("failed writing samples");
  man.seeds.push_back(a.seed);
  man.add(man.out / "samples.jsonl");
  if (a.oracle) man.add(man.out / "oracle_transcripts.jsonl");
  std::cout << "wrote " << n << " samples to " << (man.out / "samples.jsonl").string() << "\n";
  return 0;
}

int cmd_ruler_score(const RulerArgs& a, Manifest& man) {
  std::vector<AnswerKey> keys;
  for (const auto& j : read_records(a.samples)) keys.push_back(answer_key_from_json(j));
  std::map<std::string, std::string> responses;
  for (const auto& j : read_records(a.transcripts)) {
    try {
      responses[j.at("id").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const json::exception& e) {
      throw data_error(std::string("malformed transcript record: ") + e.what());
    }
  }
  const auto sheet = score_transcripts(keys, responses);
  write_text(man.out / "score_sheet.json", score_sheet_to_json(sheet).dump(1) + "\n");
  man.add(man.out / "score_sheet.json");
  std::printf("%-14s %7s %8s %9s\n", "task", "L", "samples", "accuracy");
  for (const auto& [cell, s] : sheet)
    std::printf("%-14s %7zu %8zu %8.1f%%\n", cell.first.c_str(), cell.second, s.samples, 100 * s.accuracy());
  return 0;
}

// ---- bind-build ----

struct BindBuildArgs {
  std::string instance;
  std::string category;
  std::string data;
  std::string extraction;
  bool from_truth = false;
  int attempt = 0;
  std::string id;
  std::string out;
};

int cmd_bind_build(const BindBuildArgs& a, Manifest& man) {
  const int sources = !a.data.empty() + !a.extraction.empty() + (a.from_truth ? 1 : 0);
  if (sources > 1) throw usage_error("give at most one of --data, --extraction, --from-truth");
  std::optional<ProblemInstance> inst;
  if (!a.instance.empty()) inst = load_instance(a.instance);
  if (!inst && (a.from_truth || (a.extraction.empty() && a.category.empty())))
    throw usage_error("--instance is required here");
  std::string id = a.id;
  if (id.empty() && inst) {
    auto p = fs::path(a.instance).lexically_normal();
    if (!p.has_filename()) p = p.parent_path();
    if (p.filename() == "instance.json") p = p.parent_path();
    id = p.filename().string();
  }
  if (id.empty()) id = "candidate";

  CandidateSubmission s;
  s.instance_id = id;
  if (!a.extraction.empty() || a.from_truth) {
    BindingExtraction e;
    if (a.from_truth) e = extraction_from_model(inst->model, inst->var_names, inst->row_names);
    else e = ingest_extraction_transcript(read_text(a.extraction));
    const auto compact = compact_serialize(e);
    const auto ex = man.out / "extractions" / (id + ".json");
    fs::create_directories(ex.parent_path());
    write_text(ex, compact + "\n");
    man.add(ex);
    s.model = build_from_extraction(parse_extraction(compact));
  } else {
    const Category c = !a.category.empty() ? parse_category(a.category) : inst->world.category;
    fs::path data = a.data;
    if (data.empty()) {
      data = fs::path(a.instance).lexically_normal();
      if (!fs::is_directory(data)) data = data.parent_path();
      data /= "bind_data.json";
    }
    s.model = build_from_bind(c, data);
  }
  s = complete_submission(std::move(s));
  auto j = submission_to_json(s);
  j["attempt"] = a.attempt;
  write_text(man.out / (id + ".json"), j.dump() + "\n");
  man.add(man.out / (id + ".json"));
  man.instances.push_back(id);
  std::cout << id << ": " << s.model->num_vars() << " vars, " << s.model->num_rows() << " rows, status "
            << (s.result ? to_string(s.result->status) : "none");
  if (s.result && s.result->objective) std::cout << ", objective " << format_number(*s.result->objective);
  if (inst && s.result && s.result->objective)
    std::cout << ", rel_error " << relative_error(*s.result->objective, inst->truth.objective);
  std::cout << "\n";
  return 0;
}

// ---- report ----

struct ReportArgs {
  std::vector<std::string> verdicts;
  std::size_t k = 1;
  bool as_json = false;
  std::string out;
};

int cmd_report(const ReportArgs& a, Manifest* man) {
  std::vector<Verdict> vs;
  for (const auto& p : a.verdicts)
    for (const auto& j : read_records(p)) vs.push_back(verdict_from_json(j));
  const auto rep = aggregate(vs, a.k);
  if (man) {
    write_text(man->out / "report.json", report_to_json(rep).dump(1) + "\n");
    write_text(man->out / "report.txt", report_table(rep));
    man->add(man->out / "report.json");
    man->add(man->out / "report.txt");
  }
  if (a.as_json) std::cout << report_to_json(rep).dump(1) << "\n";
  else std::cout << report_table(rep);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

Manifest start_manifest(const std::string& command, const std::string& out, const CLI::App* sub, int argc,
                        char** argv) {
  Manifest m;
  m.command = command;
  m.out = out;
  fs::create_directories(m.out);
  for (int i = 1; i < argc; ++i) m.argv.emplace_back(argv[i]);
  m.config = sub->config_to_str(true, false);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optbind: generate optimization binding instances, render documents, evaluate candidates"};
  app.set_config("--config", "", "TOML config file; command-line flags override its values");
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate verified instances and their documents");
  gen->add_option("--category", ga.category, "Category name or 'all'")->capture_default_str();
  gen->add_option("--count", ga.count, "Instances per category")->capture_default_str();
  gen->add_option("--tier", ga.tier, "small or large")->capture_default_str();
  gen->add_option("--seed", ga.seed, "First seed; instance i uses seed + i")->capture_default_str();
  gen->add_option("--dims", ga.dims, "Fixed dims as name=value,... (single category)");
  gen->add_option("--jobs", ga.jobs, "Worker threads")->capture_default_str();
  gen->add_option("--out", ga.out, "Output directory")->required();

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "Score candidate submissions against instance ground truth");
  ev->add_option("--instances", ea.instances, "Directory of generated instances")->required();
  ev->add_option("--submissions", ea.submissions, "Submission file (.json/.jsonl) or directory");
  ev->add_option("--adapter", ea.adapter, "Command run per attempt; prompt on stdin, submission JSON on stdout");
  ev->add_option("--mode", ea.mode, "Document setting: prose, table or bind")->capture_default_str();
  ev->add_option("--k", ea.k, "k for pass@k")->capture_default_str();
  ev->add_option("--attempts", ea.attempts, "Adapter attempts per instance (default k)");
  ev->add_option("--timeout", ea.timeout, "Adapter timeout in seconds")->capture_default_str();
  ev->add_option("--tol", ea.tol, "Relative objective tolerance")->capture_default_str();
  ev->add_option("--out", ea.out, "Output directory")->required();

  RulerArgs ra;
  auto* ru = app.add_subcommand("ruler", "Long-context retrieval tasks");
  ru->require_subcommand(1);
  auto* rg = ru->add_subcommand("generate", "Write a sample grid as JSON lines");
  rg->add_option("--tasks", ra.tasks, "Comma-separated tasks")->capture_default_str();
  rg->add_option("--lengths", ra.lengths, "Comma-separated lengths")->capture_default_str();
  rg->add_option("--n", ra.n, "Samples per (task, length) cell")->capture_default_str();
  rg->add_option("--seed", ra.seed, "Seed")->capture_default_str();
  rg->add_option("--corpus", ra.corpus, "Filler corpus file or directory (default: synthetic)");
  rg->add_flag("--oracle", ra.oracle, "Also write transcripts that echo every answer");
  rg->add_option("--out", ra.out, "Output directory")->required();
  auto* rs = ru->add_subcommand("score", "Score transcripts against samples");
  rs->add_option("--samples", ra.samples, "samples.jsonl")->required();
  rs->add_option("--transcripts", ra.transcripts, "Transcripts as {id, response} JSON lines")->required();
  rs->add_option("--out", ra.out, "Output directory")->required();

  BindBuildArgs ba;
  auto* bb = app.add_subcommand("bind-build", "Build and solve a model from BIND data or an extraction");
  bb->add_option("--instance", ba.instance, "Instance directory");
  bb->add_option("--category", ba.category, "Category (when no instance is given)");
  bb->add_option("--data", ba.data, "BIND data file (default: the instance's bind_data.json)");
  bb->add_option("--extraction", ba.extraction, "Extraction JSON or a transcript containing it");
  bb->add_flag("--from-truth", ba.from_truth, "Use the extraction of the instance's own model");
  bb->add_option("--attempt", ba.attempt, "Attempt number recorded in the submission")->capture_default_str();
  bb->add_option("--id", ba.id, "Instance id recorded in the submission");
  bb->add_option("--out", ba.out, "Output directory")->required();

  ReportArgs rp;
  auto* re = app.add_subcommand("report", "Aggregate verdict files");
  re->add_option("--verdicts", rp.verdicts, "verdicts.jsonl files or directories")->required();
  re->add_option("--k", rp.k, "k for pass@k")->capture_default_str();
  re->add_flag("--json", rp.as_json, "Print JSON instead of the table");
  re->add_option("--out", rp.out, "Output directory for report.json and report.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    int rc = 0;
    if (*gen) {
      auto m = start_manifest("generate", ga.out, gen, argc, argv);
      rc = cmd_generate(ga, m);
      m.write();
    } else if (*ev) {
      auto m = start_manifest("evaluate", ea.out, ev, argc, argv);
      rc = cmd_evaluate(ea, m);
      m.write();
    } else if (*rg) {
      auto m = start_manifest("ruler generate", ra.out, rg, argc, argv);
      rc = cmd_ruler_generate(ra, m);
      m.write();
    } else if (*rs) {
      auto m = start_manifest("ruler score", ra.out, rs, argc, argv);
      rc = cmd_ruler_score(ra, m);
      m.write();
    } else if (*bb) {
      auto m = start_manifest("bind-build", ba.out, bb, argc, argv);
      rc = cmd_bind_build(ba, m);
      m.write();
    } else if (*re) {
      if (rp.out.empty()) {
        rc = cmd_report(rp, nullptr);
      } else {
        auto m = start_manifest("report", rp.out, re, argc, argv);
        rc = cmd_report(rp, &m);
        m.write();
      }
    }
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Usage: return 1;
      case ErrorKind::Data: return 2;
      default: return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
