#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "optbind/documents.hpp"
#include "optbind/error.hpp"
#include "optbind/rng.hpp"

namespace optbind {

enum class RulerTask { SingleKey, MultiKey, MultiValue, Aggregation };

inline constexpr RulerTask kAllRulerTasks[] = {RulerTask::SingleKey, RulerTask::MultiKey, RulerTask::MultiValue,
                                               RulerTask::Aggregation};
inline constexpr std::size_t kRulerLengths[] = {1024, 2048, 4096, 8192, 16384, 32768};

inline const char* to_string(RulerTask t) {
  switch (t) {
    case RulerTask::SingleKey: return "single_key";
    case RulerTask::MultiKey: return "multi_key";
    case RulerTask::MultiValue: return "multi_value";
    default: return "aggregation";
  }
}

inline RulerTask parse_ruler_task(const std::string& s) {
  for (auto t : kAllRulerTasks)
    if (s == to_string(t)) return t;
  throw usage_error("unknown ruler task '" + s + "'");
}

inline void check_ruler_length(std::size_t L) {
  if (std::find(std::begin(kRulerLengths), std::end(kRulerLengths), L) == std::end(kRulerLengths))
    throw usage_error("ruler length must be one of 1024, 2048, 4096, 8192, 16384, 32768; got " + std::to_string(L));
}

// Haystack budget: L minus what the instruction, the query and the answer
// need, max(256, L/32) tokens.
inline std::size_t ruler_budget(std::size_t L) { return L - std::max<std::size_t>(256, L / 32); }

struct RulerCounts {
  std::size_t targets = 0;      // keys, values or items to recover
  std::size_t distractors = 0;  // one-character-off keys
  std::size_t categories = 0;   // aggregation only
};

// Value and item counts are computed on the haystack budget, distractor and
// category counts on L itself.
inline RulerCounts ruler_counts(RulerTask t, std::size_t L) {
  check_ruler_length(L);
  const std::size_t budget = ruler_budget(L);
  RulerCounts c;
  switch (t) {
    case RulerTask::SingleKey:
      c.targets = 1;
      c.distractors = std::max<std::size_t>(3, L / 1024);
      break;
    case RulerTask::MultiKey:
      c.targets = std::max<std::size_t>(2, budget / 2048);
      c.distractors = 3 * c.targets;
      break;
    case RulerTask::MultiValue:
      c.targets = std::max<std::size_t>(2, budget / 2048);
      c.distractors = std::max<std::size_t>(3, L / 1024);
      break;
    case RulerTask::Aggregation:
      c.categories = std::max<std::size_t>(3, L / 4096 + 2);
      c.targets = std::max<std::size_t>(3, budget / 2048);
      break;
  }
  return c;
}

// ---- filler corpus ----

struct FillerCorpus {
  std::vector<std::string> paragraphs;
  std::vector<std::size_t> tokens;

  std::size_t total_tokens() const { return std::accumulate(tokens.begin(), tokens.end(), std::size_t{0}); }
};

namespace detail {

inline bool usable_filler(const std::string& p) {
  return p.find("magic number") == std::string::npos && p.find("Inventory record") == std::string::npos;
}

inline std::string squash_spaces(const std::string& s) {
  std::string out;
  bool space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      space = false;
      out += ch;
    }
  }
  return out;
}

}  // namespace detail

// Paragraphs are separated by blank lines. Paragraphs that mention the needle
// phrasing are dropped.
inline FillerCorpus corpus_from_text(const std::string& text) {
  FillerCorpus c;
  std::istringstream in(text);
  std::string line, cur;
  auto flush = [&] {
    auto p = detail::squash_spaces(cur);
    cur.clear();
    if (p.empty() || !detail::usable_filler(p)) return;
    c.tokens.push_back(estimate_tokens(p));
    c.paragraphs.push_back(std::move(p));
  };
  while (std::getline(in, line)) {
    if (detail::squash_spaces(line).empty()) flush();
    else cur += line + "\n";
  }
  flush();
  return c;
}

// A file, or a directory whose .txt files are read in name order.
inline FillerCorpus load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw data_error("filler corpus not found: " + path.string());
  }
  std::string all;
  for (const auto& f : files) all += read_text(f) + "\n\n";
  auto c = corpus_from_text(all);
  if (c.paragraphs.empty()) throw data_error("filler corpus has no usable paragraphs: " + path.string());
  return c;
}

// Procedural expository prose, for tests and for runs without a corpus.
inline FillerCorpus synthetic_corpus(std::uint64_t seed, std::size_t paragraphs = 1500) {
  static const std::vector<std::string> subjects = {
      "The harbor authority", "A careful gardener", "The old railway", "Every river delta", "The village council",
      "A patient historian", "The mountain observatory", "Most small workshops", "The winter market",
      "A travelling musician", "The coastal forest", "Each new apprentice", "The public library", "A quiet monastery",
      "The textile guild", "Many northern farms", "The city archive", "A seasoned navigator", "The lighthouse keeper",
      "Our neighborhood bakery"};
  static const std::vector<std::string> verbs = {
      "keeps careful notes about", "slowly learns the value of", "often argues about", "depends heavily on",
      "was reshaped by", "rarely writes about", "quietly celebrates", "spends long evenings studying",
      "has always been wary of", "measures its success by", "trades stories about", "was built around"};
  static const std::vector<std::string> objects = {
      "the changing seasons", "the price of timber", "forgotten maps", "the patience of craft", "shared tools",
      "the rhythm of tides", "old letters and ledgers", "the habits of migrating birds", "stone bridges",
      "the meaning of good work", "local legends", "unfinished experiments", "the long road south",
      "the difference between speed and care", "public gardens", "handwritten recipes"};
  static const std::vector<std::string> tails = {
      "and nobody seems to mind.", "which surprises visitors.", "even when the weather turns.",
      "because habits outlast plans.", "as the elders once did.", "without much ceremony.",
      "in a way that rewards attention.", "long after the crowds leave.", "and the results speak quietly.",
      "while the town sleeps."};
  Rng rng(mix_seed(seed, fnv1a("ruler/filler")));
  FillerCorpus c;
  for (std::size_t p = 0; p < paragraphs; ++p) {
    std::string text;
    const auto sentences = static_cast<std::size_t>(rng.integer(4, 7));
    for (std::size_t s = 0; s < sentences; ++s) {
      if (!text.empty()) text += ' ';
      text += subjects[rng.index(subjects.size())] + " " + verbs[rng.index(verbs.size())] + " " +
              objects[rng.index(objects.size())] + " " + tails[rng.index(tails.size())];
    }
    c.tokens.push_back(estimate_tokens(text));
    c.paragraphs.push_back(std::move(text));
  }
  return c;
}

// ---- samples ----

struct Needle {
  std::string key;    // aggregation: category
  std::string value;  // aggregation: record id
  bool target = false;
  std::string text;
};

struct RulerSample {
  std::string id;
  RulerTask task = RulerTask::SingleKey;
  std::size_t length = 0;
  std::vector<std::string> target_keys;  // aggregation: the queried category
  std::vector<Needle> needles;           // in haystack order
  std::string haystack;
  std::string query;
  std::string prompt;
  std::vector<std::string> answers;  // aggregation: a single decimal count
  std::size_t tokens = 0;            // proxy tokens of the prompt
};

inline const std::vector<std::string>& ruler_category_names() {
  static const std::vector<std::string> names = {"amber", "cobalt", "crimson", "emerald", "ivory", "jade",
                                                 "ochre", "saffron", "scarlet", "slate", "teal", "violet"};
  return names;
}

namespace detail {

inline const std::string kKeyAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";

inline std::string random_key(Rng& rng) {
  std::string k = "key-";
  for (int i = 0; i < 10; ++i) k += kKeyAlphabet[rng.index(kKeyAlphabet.size())];
  return k;
}

inline std::string hex_id(Rng& rng) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (int i = 0; i < 32; ++i) s += hex[rng.index(16)];
  return s;
}

// Substitutes one character after the "key-" prefix.
inline std::string one_off(const std::string& key, Rng& rng) {
  std::string k = key;
  const std::size_t pos = 4 + rng.index(k.size() - 4);
  char ch;
  do ch = kKeyAlphabet[rng.index(kKeyAlphabet.size())];
  while (ch == k[pos]);
  k[pos] = ch;
  return k;
}

inline std::string magic_needle(const std::string& key, const std::string& value) {
  return "One of the special magic numbers for " + key + " is: " + value + ".";
}

inline std::string record_needle(const std::string& cat, const std::string& id) {
  return "Inventory record " + id + " belongs to the " + cat + " category.";
}

inline std::string join_keys(const std::vector<std::string>& keys) {
  std::string s;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) s += i + 1 == keys.size() ? ", and " : ", ";
    s += keys[i];
  }
  return s;
}

}  // namespace detail

inline std::string ruler_sample_id(RulerTask t, std::size_t L, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return std::string(to_string(t)) + "-" + std::to_string(L) + "-" + buf;
}

// Builds one sample: needles are placed at uniformly random paragraph gaps of
// a filler stretch sized so the haystack reaches about ruler_budget(L) proxy tokens.
inline RulerSample generate_sample(RulerTask task, std::size_t L, std::uint64_t seed, const FillerCorpus& corpus,
                                   std::size_t index = 0) {
  const auto counts = ruler_counts(task, L);
  RulerSample s;
  s.id = ruler_sample_id(task, L, index);
  s.task = task;
  s.length = L;
  Rng rng(mix_seed(seed, fnv1a(s.id)));

  std::set<std::string> used_keys, used_values;
  auto fresh_key = [&] {
    std::string k;
    do k = detail::random_key(rng);
    while (used_keys.count(k));
    used_keys.insert(k);
    return k;
  };
  auto fresh_value = [&] {
    std::string v;
    do v = detail::hex_id(rng);
    while (used_values.count(v));
    used_values.insert(v);
    return v;
  };
  // distractor keys are drawn after every real key exists so none can collide
  std::vector<std::pair<std::string, std::size_t>> distractor_plan;  // base key, count
  std::vector<Needle> needles;
  switch (task) {
    case RulerTask::SingleKey:
    case RulerTask::MultiKey: {
      for (std::size_t i = 0; i < counts.targets; ++i) s.target_keys.push_back(fresh_key());
      for (const auto& k : s.target_keys) needles.push_back({k, fresh_value(), true, ""});
      if (task == RulerTask::SingleKey) distractor_plan.emplace_back(s.target_keys[0], counts.distractors);
      else
        for (const auto& k : s.target_keys) distractor_plan.emplace_back(k, 3);
      break;
    }
    case RulerTask::MultiValue: {
      s.target_keys.push_back(fresh_key());
      for (std::size_t i = 0; i < counts.targets; ++i) needles.push_back({s.target_keys[0], fresh_value(), true, ""});
      distractor_plan.emplace_back(s.target_keys[0], counts.distractors);
      break;
    }
    case RulerTask::Aggregation: {
      std::vector<std::string> cats = ruler_category_names();
      rng.shuffle(cats);
      cats.resize(counts.categories);
      s.target_keys.push_back(cats[0]);
      // categories x items records, each placed in a uniformly random category;
      // the queried category gets at least one
      const std::size_t total = counts.categories * counts.targets;
      for (std::size_t i = 0; i < total; ++i) {
        const auto& c = i == 0 ? cats[0] : cats[rng.index(cats.size())];
        needles.push_back({c, fresh_value(), c == cats[0], ""});
      }
      break;
    }
  }
  for (const auto& [base, n] : distractor_plan)
    for (std::size_t i = 0; i < n; ++i) {
      std::string k;
      do k = detail::one_off(base, rng);
      while (used_keys.count(k));
      used_keys.insert(k);
      needles.push_back({k, fresh_value(), false, ""});
    }
  std::size_t needle_tokens = 0;
  for (auto& nd : needles) {
    nd.text = task == RulerTask::Aggregation ? detail::record_needle(nd.key, nd.value)
                                             : detail::magic_needle(nd.key, nd.value);
    needle_tokens += estimate_tokens(nd.text);
  }

  // filler: consecutive paragraphs from a random start, no paragraph twice
  const std::size_t budget = ruler_budget(L);
  if (corpus.paragraphs.empty()) throw data_error("filler corpus is empty");
  std::vector<std::size_t> picked;
  std::size_t have = needle_tokens;
  const std::size_t start = rng.index(corpus.paragraphs.size());
  for (std::size_t k = 0; k < corpus.paragraphs.size() && have < budget; ++k) {
    const std::size_t p = (start + k) % corpus.paragraphs.size();
    if (have + corpus.tokens[p] > budget && have + corpus.tokens[p] / 2 > budget) break;
    picked.push_back(p);
    have += corpus.tokens[p];
  }
  if (have + 200 < budget)
    throw data_error("filler corpus too small for length " + std::to_string(L) + ": reached " +
                     std::to_string(have) + " of " + std::to_string(budget) + " proxy tokens");

  // uniform gap for every needle, ties broken by a random order
  rng.shuffle(needles);
  std::vector<std::size_t> gap(needles.size());
  for (auto& g : gap) g = rng.index(picked.size() + 1);
  std::vector<std::size_t> order(needles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gap[a] < gap[b]; });
  std::size_t next = 0;
  for (std::size_t g = 0; g <= picked.size(); ++g) {
    while (next < order.size() && gap[order[next]] == g) {
      if (!s.haystack.empty()) s.haystack += "\n\n";
      s.haystack += needles[order[next]].text;
      s.needles.push_back(needles[order[next]]);
      ++next;
    }
    if (g < picked.size()) {
      if (!s.haystack.empty()) s.haystack += "\n\n";
      s.haystack += corpus.paragraphs[picked[g]];
    }
  }

  std::string intro;
  switch (task) {
    case RulerTask::Aggregation: {
      std::size_t count = 0;
      for (const auto& nd : s.needles) count += nd.target ? 1 : 0;
      s.answers = {std::to_string(count)};
      intro = "Inventory records are scattered through the following text. Keep track of them; I will ask about them "
              "afterwards.";
      s.query = "How many inventory records belong to the " + s.target_keys[0] +
                " category? Answer with the count as a number.";
      break;
    }
    case RulerTask::SingleKey:
      for (const auto& nd : s.needles)
        if (nd.target) s.answers.push_back(nd.value);
      s.query = "What is the special magic number for " + s.target_keys[0] + "? Answer with the value only.";
      break;
    case RulerTask::MultiKey:
      for (const auto& k : s.target_keys)
        for (const auto& nd : s.needles)
          if (nd.target && nd.key == k) s.answers.push_back(nd.value);
      s.query = "What are the special magic numbers for " + detail::join_keys(s.target_keys) +
                "? List every value.";
      break;
    case RulerTask::MultiValue:
      for (const auto& nd : s.needles)
        if (nd.target) s.answers.push_back(nd.value);
      s.query = "What are all the special magic numbers for " + s.target_keys[0] + "? List every value.";
      break;
  }
  if (intro.empty())
    intro = "Some special magic numbers are hidden within the following text. Make sure to memorize them. I will "
            "quiz you about them afterwards.";
  s.prompt = intro + "\n\n" + s.haystack + "\n\n" + s.query + "\n";
  s.tokens = estimate_tokens(s.prompt);
  return s;
}

// 1 iff every expected value occurs in the response; for aggregation the
// count must occur as a standalone number.
inline int score_exact(const RulerSample& s, const std::string& response) {
  if (s.task == RulerTask::Aggregation) {
    for (const auto& t : extract_numbers(response))
      if (t.text == s.answers.at(0)) return 1;
    return 0;
  }
  for (const auto& a : s.answers)
    if (response.find(a) == std::string::npos) return 0;
  return 1;
}

// Each target needle is recalled independently with probability p.
inline std::string simulated_response(const RulerSample& s, double p, Rng& rng) {
  if (s.task == RulerTask::Aggregation) {
    std::size_t seen = 0;
    for (const auto& nd : s.needles) seen += nd.target && rng.bernoulli(p) ? 1 : 0;
    return "I count " + std::to_string(seen) + " records.";
  }
  std::string out = "Values:";
  for (const auto& a : s.answers)
    if (rng.bernoulli(p)) out += " " + a;
  return out;
}

// Number of independent recalls a sample needs.
inline std::size_t needle_count(const RulerSample& s) {
  std::size_t k = 0;
  for (const auto& nd : s.needles) k += nd.target ? 1 : 0;
  return k;
}

inline nlohmann::json sample_to_json(const RulerSample& s) {
  return {{"id", s.id},         {"task", to_string(s.task)}, {"L", s.length},
          {"prompt", s.prompt}, {"answers", s.answers},      {"tokens", s.tokens}};
}

struct AnswerKey {
  std::string id;
  RulerTask task;
  std::size_t length;
  std::vector<std::string> answers;
};

inline AnswerKey answer_key_from_json(const nlohmann::json& j) {
  try {
    return {j.at("id").get<std::string>(), parse_ruler_task(j.at("task").get<std::string>()),
            j.at("L").get<std::size_t>(), j.at("answers").get<std::vector<std::string>>()};
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed ruler sample record: ") + e.what());
  } catch (const Error& e) {
    throw data_error(std::string("malformed ruler sample record: ") + e.what());
  }
}

inline int score_exact(const AnswerKey& k, const std::string& response) {
  RulerSample s;
  s.task = k.task;
  s.answers = k.answers;
  return score_exact(s, response);
}

// ---- batches ----

struct CellScore {
  std::size_t samples = 0;
  std::size_t correct = 0;
  double accuracy() const { return samples ? static_cast<double>(correct) / static_cast<double>(samples) : 0.0; }
};

using ScoreSheet = std::map<std::pair<std::string, std::size_t>, CellScore>;

// Streams the (task, length) grid to `sink`; samples are not retained.
inline std::size_t ruler_batch(const std::vector<RulerTask>& tasks, const std::vector<std::size_t>& lengths,
                               std::size_t n_per_cell, std::uint64_t seed, const FillerCorpus& corpus,
                               const std::function<void(const RulerSample&)>& sink) {
  if (n_per_cell == 0) throw usage_error("ruler batch needs at least one sample per cell");
  for (auto L : lengths) check_ruler_length(L);
  std::size_t n = 0;
  for (auto t : tasks)
    for (auto L : lengths)
      for (std::size_t i = 0; i < n_per_cell; ++i) {
        sink(generate_sample(t, L, seed, corpus, i));
        ++n;
      }
  return n;
}

// Scores {id, response} transcripts against answer keys. Samples without a
// transcript count as wrong.
inline ScoreSheet score_transcripts(const std::vector<AnswerKey>& keys,
                                    const std::map<std::string, std::string>& responses) {
  ScoreSheet sheet;
  for (const auto& k : keys) {
    auto& cell = sheet[{to_string(k.task), k.length}];
    ++cell.samples;
    auto it = responses.find(k.id);
    if (it != responses.end()) cell.correct += static_cast<std::size_t>(score_exact(k, it->second));
  }
  return sheet;
}

inline nlohmann::json score_sheet_to_json(const ScoreSheet& sheet) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [cell, s] : sheet)
    j.push_back({{"task", cell.first}, {"L", cell.second}, {"samples", s.samples}, {"correct", s.correct},
                 {"accuracy", s.accuracy()}});
  return j;
}

}  // namespace optbind
