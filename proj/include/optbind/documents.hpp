#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "optbind/generators.hpp"
#include "optbind/numfmt.hpp"

namespace optbind {

// Token count proxy: 1.3 tokens per word. Words are separated by whitespace
// and by the pipe character used in data tables.
inline std::size_t estimate_tokens(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (unsigned char ch : text) {
    const bool sep = std::isspace(ch) != 0 || ch == '|';
    if (!sep && !in_word) ++words;
    in_word = !sep;
  }
  return static_cast<std::size_t>(std::llround(1.3 * static_cast<double>(words)));
}

// ---- numbers in text ----

struct NumberToken {
  std::string text;
  std::size_t pos = 0;
};

// Numeric literals standing alone as words: not glued to letters, digits or
// underscores on either side. A trailing sentence period is allowed.
inline std::vector<NumberToken> extract_numbers(std::string_view s) {
  std::vector<NumberToken> out;
  auto wordy = [](unsigned char c) { return std::isalnum(c) != 0 || c == '_'; };
  std::size_t i = 0;
  while (i < s.size()) {
    const bool neg = s[i] == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
    if (!std::isdigit(static_cast<unsigned char>(s[i])) && !neg) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (neg) ++i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                            (s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))))
      ++i;
    const bool left_ok = start == 0 || !wordy(static_cast<unsigned char>(s[start - 1]));
    const bool right_ok = i == s.size() || !wordy(static_cast<unsigned char>(s[i]));
    if (left_ok && right_ok) out.push_back({std::string(s.substr(start, i - start)), start});
    while (i < s.size() && wordy(static_cast<unsigned char>(s[i]))) ++i;
  }
  return out;
}

// ---- category narratives (structure only, no data) ----

struct Narrative {
  std::string title;
  std::string body;
};

inline Narrative category_narrative(Category c) {
  switch (c) {
    case Category::ResourceAllocation:
      return {"Production plan",
              "A plant makes num_products products from num_resources shared resources. Each unit of a product earns "
              "its profit and consumes usage units of every resource; total use of a resource may not exceed its "
              "availability. Each product is made at no less than its min_level and no more than its max_level, where "
              "null means there is no upper limit. Products flagged in integer_flag are made in whole units only. Choose "
              "the output of every product to maximize total profit."};
    case Category::Transportation:
      return {"Distribution plan",
              "We ship a single product from num_sources sources to num_destinations destinations. Each source can "
              "send at most its supply in total. Each destination must receive exactly its demand. Every unit shipped "
              "on a lane costs the lane's unit cost, and shipments may be fractional. Choose the shipments that "
              "minimize total shipping cost."};
    case Category::DisasterResponse:
      return {"Relief logistics plan",
              "Relief goods move from num_depots depots to num_shelters shelters over num_periods periods. A depot can "
              "send at most its stock over the whole horizon and at most its vehicle capacity in any single period. "
              "In every period a shelter's demand is met by the deliveries it receives in that period plus a shortage; "
              "deliveries never exceed demand, and every unit of shortage costs the shelter's shortage penalty. Goods "
              "may travel from a depot to a shelter, in any period, only after that route has been secured, which costs "
              "its security cost once. Every unit moved costs the unit cost of its depot and shelter. Deliveries may be "
              "fractional. Minimize moving costs plus security costs plus shortage penalties."};
    case Category::Jssp:
      return {"Job shop schedule",
              "Each of num_jobs jobs visits every one of num_machines machines exactly once, in the order given by its "
              "machine sequence (machines are numbered from zero), with the matching processing time for each "
              "operation. An operation cannot start before the previous operation of its job has finished. A machine "
              "processes one operation at a time, without interruption. All jobs are available at time zero and start "
              "times may be fractional. Minimize the makespan, the time at which the last operation finishes."};
    case Category::Vrptw:
      return {"Delivery routing plan",
              "At most num_vehicles identical vehicles start and end at the depot and serve num_customers customers. "
              "Each customer is visited exactly once by exactly one vehicle. The travel time matrix covers num_nodes "
              "nodes: the first row and column are the depot, followed by the customers in order. Service at a customer "
              "must start within its window, from window open to window close; a vehicle that arrives early waits. "
              "Service lasts the customer's service time, after which the vehicle drives on. Vehicles leave the depot "
              "at time zero and may return at any time. The demands on one route may not exceed the vehicle capacity. "
              "Minimize total travel time, including the legs from and back to the depot."};
    case Category::Rcpsp:
      return {"Project schedule",
              "A project has num_activities activities, and each runs in exactly one of num_modes modes. The mode fixes "
              "the activity's duration in whole periods, the resource units it uses in every period it runs, and a "
              "one-off cost. Activities start at whole periods, counted from period zero, and run without interruption. "
              "For each of the num_precedences precedence pairs (activities are numbered from zero), the successor "
              "starts at least lag periods after the predecessor finishes. In every period, the resource use of the "
              "activities running may not exceed the resource capacity. Total mode cost may not exceed the budget, and "
              "every activity must finish by the deadline. Minimize the makespan, the finish time of the last activity."};
    case Category::FacilityLocation:
      return {"Facility network plan",
              "There are num_facilities candidate sites and num_customers customers, each given by planar coordinates. "
              "Opening a site costs its fixed cost. Every customer must receive exactly its demand, which may be split "
              "across open sites. An open site ships at most its capacity in total and a closed site ships nothing. "
              "Shipping one unit from a site to a customer costs the cost per unit distance times the straight-line "
              "(Euclidean) distance between them, not rounded. Minimize opening costs plus shipping costs."};
    case Category::PowerTransmission:
      return {"Power dispatch and expansion plan",
              "A network has num_buses buses, num_generators generators and num_lines lines; buses are numbered from "
              "zero. A generator at its bus produces between nothing and its capacity, at its cost per megawatt. Power "
              "flows on a line in either direction up to the line capacity. At every bus, generation plus inflow minus "
              "outflow equals demand. Existing lines are always available; a candidate line carries flow only if it is "
              "built, at its build cost. Resistive losses are priced but not subtracted from flows: a line's loss cost "
              "is the loss cost rate times its resistance divided by the square of its voltage in kilovolts, times the "
              "square of its flow. Minimize generation cost plus build cost plus loss cost."};
    case Category::QueuingStaffing:
      return {"Contact center staffing plan",
              "There are num_stations stations, num_shifts shifts per day and num_days days of arrival history. The "
              "hourly arrival rate at a station in a shift is the average of its arrival history over the days. Each "
              "agent serves the station's service rate of customers per hour, and a station with a given number of "
              "agents behaves as an M/M/s queue (Erlang C). A staffing level is compliant when it is stable and the "
              "share of customers waiting longer than the target wait is at most the maximum late fraction. For every "
              "station and shift, choose one of the num_levels smallest compliant levels, that is the smallest "
              "compliant level or one of the levels just above it. A level costs the station's wage per agent plus the "
              "wait cost times the expected customer-hours of waiting in the shift (arrival rate times shift hours "
              "times the mean wait in hours). Agents used in a shift across all stations may not exceed the staff pool. "
              "Minimize total cost."};
    case Category::StochasticTransportation:
      return {"Distribution plan under uncertain demand",
              "We ship from num_sources sources to num_destinations destinations before demand is known. Demand "
              "follows one of num_scenarios equally likely scenarios. Each source ships at most its supply. A scenario "
              "is covered when every destination receives at least its demand in that scenario; at least the share of "
              "scenarios given by one minus the risk level, rounded up to a whole number of scenarios, must be covered. "
              "In every scenario each unit by which a destination's shipments fall short of its demand costs the "
              "destination's shortage penalty, weighted by the scenario probability. Shipments may be fractional. "
              "Minimize shipping cost plus expected shortage penalty."};
    case Category::MultiObjectiveTransportation:
      return {"Sourcing plan with emissions",
              "We ship from num_suppliers suppliers to num_destinations destinations, and each destination receives "
              "exactly its demand. Using a supplier at all costs its fixed cost. A used supplier ships between its "
              "minimum order and its capacity in total, and an unused one ships nothing. At most max suppliers may be "
              "used. Each unit shipped costs its unit cost and emits its emissions in kilograms. The two goals are "
              "combined into one: minimize unit costs plus fixed costs plus the emission weight times total emissions. "
              "Shipments may be fractional."};
    case Category::ModifiedFacilityLocation:
      return {"Facility network plan with service rules",
              "There are num_facilities candidate sites and num_customers customers, each given by planar coordinates. "
              "Opening a site costs its fixed cost. Every customer receives exactly its demand from exactly one open "
              "site. An open site ships at most its capacity in total and serves at most its maximum number of "
              "customers; a closed site serves nobody. Sites flagged as must open are opened. Shipping one unit from a "
              "site to a customer costs the cost per unit distance times the straight-line (Euclidean) distance "
              "between them, not rounded. Minimize opening costs plus shipping costs."};
  }
  throw internal_error("unknown category");
}

// ---- pipe tables ----

inline std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

inline std::string placeholder(const std::string& name) { return "{" + upper(name) + "}"; }

// Label of index i along a dimension, as used in table rows and headers.
inline std::string axis_label(Category c, const std::string& field, std::size_t axis, const std::string& dim,
                              std::size_t i) {
  if (c == Category::Jssp && axis == 1) return "Op" + std::to_string(i + 1);
  if (dim == "num_nodes") return i == 0 ? std::string("Depot") : "C" + std::to_string(i);
  static const std::map<std::string, std::string> prefix = {
      {"num_sources", "S"},     {"num_destinations", "D"}, {"num_scenarios", "K"},   {"num_suppliers", "S"},
      {"num_jobs", "J"},        {"num_machines", "M"},     {"num_customers", "C"},   {"num_vehicles", "V"},
      {"num_activities", "A"},  {"num_modes", "Mode"},     {"num_precedences", "P"}, {"num_depots", "Depot"},
      {"num_shelters", "Shelter"}, {"num_periods", "T"},   {"num_facilities", "F"},  {"num_buses", "B"},
      {"num_generators", "G"},  {"num_lines", "L"},        {"num_stations", "St"},   {"num_shifts", "Sh"},
      {"num_days", "Day"},      {"num_products", "P"},     {"num_resources", "R"},   {"num_levels", "Lv"}};
  (void)field;
  auto it = prefix.find(dim);
  return (it == prefix.end() ? std::string("I") : it->second) + std::to_string(i + 1);
}

inline std::string format_value(double v) { return std::isfinite(v) ? format_number(v) : std::string("none"); }

// Scalars render as the bare value and vectors as one pipe-joined row. Arrays
// with more axes get a header row (leading dim names, then labels of the last
// axis) and one labeled row per combination of the leading indices.
inline std::string render_table(Category c, const FieldSpec& f, const Array& a) {
  if (f.shape.empty()) return format_value(a.value());
  if (f.shape.size() == 1) {
    std::string s;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += (i ? "|" : "") + format_value(a.data[i]);
    return s;
  }
  const std::size_t last = a.shape.back();
  const std::size_t lead = a.shape.size() - 1;
  std::string head;
  for (std::size_t k = 0; k < lead; ++k) head += (k ? "/" : "") + f.shape[k];
  for (std::size_t j = 0; j < last; ++j) head += "|" + axis_label(c, f.name, lead, f.shape[lead], j);
  std::string s = head;
  const std::size_t rows = last == 0 ? 0 : a.data.size() / last;
  std::vector<std::size_t> idx(lead, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string line;
    for (std::size_t k = 0; k < lead; ++k) line += (k ? "/" : "") + axis_label(c, f.name, k, f.shape[k], idx[k]);
    for (std::size_t j = 0; j < last; ++j) line += "|" + format_value(a.data[r * last + j]);
    s += "\n" + line;
    for (std::size_t k = lead; k-- > 0;) {
      if (++idx[k] < a.shape[k]) break;
      idx[k] = 0;
    }
  }
  return s;
}

// Inverse of render_table for a known shape.
inline Array parse_table(const std::string& text, const std::vector<std::size_t>& shape, const std::string& name) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (i == s.size() || s[i] == sep) {
        out.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    return out;
  };
  auto value = [&](const std::string& tok) {
    if (tok == "none") return kInf;
    auto v = parse_number(tok);
    if (!v) throw data_error("table '" + name + "' holds a non-numeric cell '" + tok + "'");
    return *v;
  };
  Array a;
  a.shape = shape;
  if (shape.empty()) {
    a.data.push_back(value(text));
    return a;
  }
  if (shape.size() == 1) {
    if (shape[0] == 0) return a;
    for (const auto& t : split(text, '|')) a.data.push_back(value(t));
  } else {
    auto lines = split(text, '\n');
    for (std::size_t r = 1; r < lines.size(); ++r) {
      auto cells = split(lines[r], '|');
      if (cells.size() != shape.back() + 1) throw data_error("table '" + name + "' has a ragged row");
      for (std::size_t j = 1; j < cells.size(); ++j) a.data.push_back(value(cells[j]));
    }
  }
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  if (a.data.size() != n) throw data_error("table '" + name + "' does not match its shape");
  return a;
}

// ---- templated memo ----

// Business memo built from the schema alone: narrative, a sizes section and
// one data section per field, each holding a placeholder.
inline std::string make_template(Category c) {
  const auto& schema = category_def(c).schema;
  const auto nar = category_narrative(c);
  std::string s = "MEMO: " + nar.title + "\n\n" + nar.body + "\n\nSizes\n";
  for (const auto& d : schema.dims) s += "- " + d + ": " + placeholder(d) + "\n";
  s += "\nData tables. Values are separated by the pipe character; tables with a header row list one labeled row per "
       "entity.\n";
  for (const auto& f : schema.fields) s += "\nData: " + f.name + " (" + shape_string(f) + "), " + f.note + "\n" + placeholder(f.name) + "\n";
  return s;
}

// Replaces every placeholder with its pipe table or size. Unknown or unfilled
// placeholders are errors.
inline std::string insert_data(const std::string& tmpl, const WorldState& w) {
  const auto& schema = category_def(w.category).schema;
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const auto open = tmpl.find('{', i);
    if (open == std::string::npos) {
      out += tmpl.substr(i);
      break;
    }
    out += tmpl.substr(i, open - i);
    const auto close = tmpl.find('}', open);
    if (close == std::string::npos) throw data_error("template has an unterminated placeholder");
    const std::string key = tmpl.substr(open + 1, close - open - 1);
    bool done = false;
    for (const auto& d : schema.dims)
      if (upper(d) == key) {
        out += std::to_string(w.dim(d));
        done = true;
      }
    for (const auto& f : schema.fields)
      if (!done && upper(f.name) == key) {
        out += render_table(w.category, f, w.param(f.name));
        done = true;
      }
    if (!done) throw data_error("template placeholder {" + key + "} does not name a schema field");
    i = close + 1;
  }
  if (out.find('{') != std::string::npos || out.find('}') != std::string::npos)
    throw data_error("templated document still holds a placeholder");
  return out;
}

inline std::string render_template(const ProblemInstance& p) {
  if (p.world.category == Category::ResourceAllocation)
    throw usage_error("resource allocation is rendered as prose, not from a template");
  return insert_data(make_template(p.world.category), p.world);
}

// Reads every data table of a templated document back into arrays.
inline std::map<std::string, Array> parse_templated(const std::string& doc, const WorldState& w) {
  const auto& schema = category_def(w.category).schema;
  std::map<std::string, Array> out;
  for (const auto& f : schema.fields) {
    const std::string tag = "\nData: " + f.name + " (";
    const auto at = doc.find(tag);
    if (at == std::string::npos) throw data_error("document has no table for " + f.name);
    const auto body = doc.find('\n', at + 1) + 1;
    auto end = doc.find("\n\n", body);
    if (end == std::string::npos) end = doc.size();
    std::string text = doc.substr(body, end - body);
    while (!text.empty() && text.back() == '\n') text.pop_back();
    out[f.name] = parse_table(text, expected_shape(f, w.dims), f.name);
  }
  return out;
}

// ---- prose (resource allocation) ----

namespace detail {

inline const std::vector<std::string>& product_names() {
  static const std::vector<std::string> v = {
      "Retrofit Packages", "Solar Kits",     "Heat Pumps",      "Water Filters",   "Battery Packs",
      "Smart Meters",      "Insulation Rolls", "Wind Blades",   "Charging Posts",  "Sensor Arrays",
      "Valve Assemblies",  "Control Panels", "Cable Drums",     "Pump Housings",   "Air Handlers",
      "Gear Sets",         "Frame Kits",     "Display Units",   "Filter Cartridges", "Motor Drives"};
  return v;
}

inline const std::vector<std::string>& resource_names() {
  static const std::vector<std::string> v = {
      "emissions allowance", "assembly labor",  "machine time",   "steel stock",    "copper wire",
      "testing bench time",  "warehouse space", "paint supply",   "crane time",     "packing material",
      "electronics stock",   "welding hours",   "inspection time", "freight slots", "clean room time",
      "polymer resin",       "glass panels",    "fastener stock", "calibration time", "engineering hours"};
  return v;
}

inline std::string unit_word(bool integer) { return integer ? "completed unit" : "unit"; }

}  // namespace detail

// Values a complete prose rendering must contain, in rendering order.
inline std::vector<std::string> prose_values(const WorldState& w) {
  const std::size_t n = w.count("num_products"), m = w.count("num_resources");
  const auto& profit = w.param("profit");
  const auto& usage = w.param("usage");
  const auto& avail = w.param("availability");
  const auto& lo = w.param("min_level");
  const auto& hi = w.param("max_level");
  std::vector<std::string> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (profit(j) != 0.0) out.push_back(format_number(profit(j)));
    for (std::size_t i = 0; i < m; ++i)
      if (usage(i, j) != 0.0) out.push_back(format_number(usage(i, j)));
    if (lo(j) != 0.0) out.push_back(format_number(lo(j)));
    if (std::isfinite(hi(j))) out.push_back(format_number(hi(j)));
  }
  for (std::size_t i = 0; i < m; ++i) out.push_back(format_number(avail(i)));
  return out;
}

using TextGenerator = std::function<std::string(const std::string&)>;

inline std::string render_prose_text(const WorldState& w) {
  const std::size_t n = w.count("num_products"), m = w.count("num_resources");
  if (n > detail::product_names().size() || m > detail::resource_names().size())
    throw usage_error("prose rendering supports at most twenty products and resources");
  const auto& profit = w.param("profit");
  const auto& usage = w.param("usage");
  const auto& avail = w.param("availability");
  const auto& lo = w.param("min_level");
  const auto& hi = w.param("max_level");
  const auto& flag = w.param("integer_flag");
  std::string s =
      "Our plant is planning next period's output. The goal is to maximize total contribution across the product "
      "lines below, subject to our shared resource limits.\n";
  for (std::size_t j = 0; j < n; ++j) {
    const bool whole = flag(j) != 0.0;
    const auto& name = detail::product_names()[j];
    s += "\n" + name + ": ";
    if (profit(j) != 0.0)
      s += "Each " + detail::unit_word(whole) + " adds " + format_number(profit(j)) + " in contribution. ";
    else
      s += "This line adds no contribution. ";
    for (std::size_t i = 0; i < m; ++i)
      if (usage(i, j) != 0.0)
        s += "Each unit uses " + format_number(usage(i, j)) + " units from our " + detail::resource_names()[i] + ". ";
    if (whole) s += "This line is produced in whole units only. ";
    if (lo(j) != 0.0) s += "We are committed to at least " + format_number(lo(j)) + " units. ";
    if (std::isfinite(hi(j))) s += "No more than " + format_number(hi(j)) + " units can be made. ";
    else s += "There is no upper limit on this line. ";
  }
  s += "\n";
  for (std::size_t i = 0; i < m; ++i) {
    auto name = detail::resource_names()[i];
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    s += "\n" + name + ": Total available is " + format_number(avail(i)) + " units and cannot be exceeded.";
  }
  return s + "\n";
}

// Deterministic prose for a resource allocation instance. An external
// generator may rewrite the text; the result must still carry every value.
inline std::string render_prose(const ProblemInstance& p, const TextGenerator& rewrite = {}) {
  if (p.world.category != Category::ResourceAllocation)
    throw usage_error("prose rendering is defined for resource allocation only");
  std::string text = render_prose_text(p.world);
  if (rewrite) text = rewrite(text);
  std::multiset<std::string> found;
  for (const auto& t : extract_numbers(text)) found.insert(t.text);
  for (const auto& v : prose_values(p.world)) {
    auto it = found.find(v);
    if (it == found.end()) throw data_error("render error: coefficient " + v + " is missing from the prose");
    found.erase(it);
  }
  return text;
}

// ---- BIND ----

inline nlohmann::json bind_data_json(const WorldState& w) {
  const auto& schema = category_def(w.category).schema;
  nlohmann::json j = nlohmann::json::object();
  for (const auto& d : schema.dims) j[d] = w.dim(d);
  for (const auto& f : schema.fields) j[f.name] = array_to_nested(w.param(f.name), f.type);
  return j;
}

// Rebuilds a world from a BIND data file; formulate() on it gives the model.
inline WorldState world_from_bind_data(Category c, const nlohmann::json& j) {
  const auto& schema = category_def(c).schema;
  WorldState w;
  w.category = c;
  try {
    for (const auto& d : schema.dims) w.dims[d] = j.at(d).get<std::int64_t>();
    for (const auto& f : schema.fields) w.params[f.name] = array_from_nested(j.at(f.name), expected_shape(f, w.dims), f.name);
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed data file: ") + e.what());
  }
  check_against_schema(w, schema);
  return w;
}

inline std::string bind_prompt_text(Category c, const std::string& data_path) {
  const auto& schema = category_def(c).schema;
  const auto nar = category_narrative(c);
  std::string s = nar.title + "\n\n" + nar.body +
                  "\n\nAll numeric data is in a JSON file. Load it and read every value from it; do not assume any "
                  "value.\n\nDimensions (integers in the file):\n";
  for (const auto& d : schema.dims) s += "- " + d + "\n";
  s += "\nFields (nested arrays in row-major order, null where a value is unlimited):\n";
  for (const auto& f : schema.fields) s += "- " + f.name + ": " + shape_string(f) + ", " + f.note + "\n";
  s += "\nData file: " + data_path + " (next to this prompt)\n";
  return s;
}

// Numbers in the prompt, outside the data path, that equal a data value.
inline std::vector<std::string> bind_contamination(const std::string& prompt, const std::string& data_path,
                                                   const WorldState& w) {
  std::string text = prompt;
  if (!data_path.empty())
    for (auto at = text.find(data_path); at != std::string::npos; at = text.find(data_path, at))
      text.replace(at, data_path.size(), " ");
  std::set<double> values;
  for (const auto& [k, a] : w.params)
    for (double v : a.data) values.insert(v);
  for (const auto& [k, v] : w.dims) values.insert(static_cast<double>(v));
  std::vector<std::string> hits;
  for (const auto& t : extract_numbers(text)) {
    auto v = parse_number(t.text);
    if (v && values.count(*v)) hits.push_back(t.text);
  }
  return hits;
}

struct BindOutput {
  std::string prompt;
  std::filesystem::path data_path;
};

inline BindOutput externalize_bind(const ProblemInstance& p, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / "bind_data.json";
  write_text(path, bind_data_json(p.world).dump(1) + "\n");
  BindOutput b{bind_prompt_text(p.world.category, path.filename().string()), path};
  const auto hits = bind_contamination(b.prompt, path.filename().string(), p.world);
  if (!hits.empty()) throw data_error("bind prompt contains data value " + hits.front());
  return b;
}

// ---- bundle ----

struct DocumentBundle {
  std::optional<std::string> prose;
  std::optional<std::string> templated;
  std::optional<std::string> bind_prompt;
  std::optional<std::filesystem::path> bind_data_path;
  BindSchema schema;
  std::map<std::string, std::size_t> est_tokens;
};

// Renders every applicable document into `dir` next to instance.json.
inline DocumentBundle render_documents(const ProblemInstance& p, const std::filesystem::path& dir) {
  DocumentBundle d;
  d.schema = category_def(p.world.category).schema;
  std::filesystem::create_directories(dir);
  if (p.world.category == Category::ResourceAllocation) {
    d.prose = render_prose(p);
    d.est_tokens["prose"] = estimate_tokens(*d.prose);
    write_text(dir / "prose.txt", *d.prose);
  } else {
    d.templated = render_template(p);
    d.est_tokens["templated"] = estimate_tokens(*d.templated);
    write_text(dir / "templated.txt", *d.templated);
  }
  auto b = externalize_bind(p, dir);
  d.bind_prompt = b.prompt;
  d.bind_data_path = b.data_path;
  d.est_tokens["bind_prompt"] = estimate_tokens(b.prompt);
  write_text(dir / "bind_prompt.txt", b.prompt);
  return d;
}

// The document a model would be given in the inline setting.
inline std::string primary_document(const ProblemInstance& p) {
  return p.world.category == Category::ResourceAllocation ? render_prose(p) : render_template(p);
}

}  // namespace optbind
