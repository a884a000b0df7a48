#include "peakmdp/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace peakmdp {

using nlohmann::json;

namespace {

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

const json& member(const json& object, const char* key, const char* where) {
  if (!object.is_object() || !object.contains(key)) {
    throw FormatError(std::string(where) + ": missing \"" + key + "\"");
  }
  return object.at(key);
}

std::size_t as_count(const json& value, const char* what) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
    throw FormatError(std::string(what) + " must be a nonnegative integer");
  }
  return value.get<std::size_t>();
}

double as_real(const json& value, const char* what) {
  if (!value.is_number()) throw FormatError(std::string(what) + " must be a number");
  return value.get<double>();
}

World parse_world(const json& doc) {
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    const std::size_t w = as_count(member(g, "width", "grid"), "grid.width");
    const std::size_t h = as_count(member(g, "height", "grid"), "grid.height");
    try {
      return World(GridWorld(w, h));
    } catch (const std::invalid_argument& e) {
      throw InvalidScenario({e.what()});
    }
  }
  if (doc.contains("graph")) {
    const json& g = doc.at("graph");
    const std::size_t n = as_count(member(g, "states", "graph"), "graph.states");
    const std::size_t m = as_count(member(g, "actions", "graph"), "graph.actions");
    const json& rows = member(g, "next", "graph");
    if (!rows.is_array() || rows.size() != n) {
      throw FormatError("graph.next must hold one row per state");
    }
    std::vector<StateId> table;
    table.reserve(n * m);
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != m) {
        throw FormatError("every graph.next row must hold one entry per action");
      }
      for (const auto& entry : row) {
        if (!entry.is_number_integer()) throw FormatError("graph.next entries must be integers");
        const auto t = entry.get<std::int64_t>();
        if (t < -1) throw FormatError("graph.next entries must be a state id or -1");
        table.push_back(t == -1 ? kUnavailable : static_cast<StateId>(t));
      }
    }
    try {
      return World(TransitionGraph(n, m, std::move(table)));
    } catch (const std::invalid_argument& e) {
      throw InvalidScenario({e.what()});
    }
  }
  throw FormatError("scenario needs a \"grid\" or a \"graph\" object");
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  const json doc = parse_document(json_text);
  if (!doc.is_object()) throw FormatError("scenario must be a JSON object");
  World world = parse_world(doc);
  const double gamma = as_real(member(doc, "gamma", "scenario"), "gamma");

  const json& list = member(doc, "rewards", "scenario");
  if (!list.is_array()) throw FormatError("rewards must be an array");
  std::vector<RewardSource> rewards;
  std::vector<std::string> errors;
  for (const auto& item : list) {
    const double value = as_real(member(item, "value", "reward"), "reward value");
    if (const auto* grid = world.grid()) {
      const std::size_t x = as_count(member(item, "x", "reward"), "reward x");
      const std::size_t y = as_count(member(item, "y", "reward"), "reward y");
      if (x >= grid->width() || y >= grid->height()) {
        errors.push_back("reward at (" + std::to_string(x) + "," + std::to_string(y) +
                         ") lies outside the grid");
        continue;
      }
      rewards.push_back({grid->state_index(x, y), value});
    } else {
      rewards.push_back({as_count(member(item, "state", "reward"), "reward state"), value});
    }
  }
  if (!errors.empty()) throw InvalidScenario(std::move(errors));
  return Scenario(std::move(world), gamma, std::move(rewards));
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_scenario(text.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string scenario_to_json(const Scenario& scenario) {
  json doc = json::object();
  const World& world = scenario.world();
  json rewards = json::array();
  if (const auto* grid = world.grid()) {
    doc["grid"] = {{"width", grid->width()}, {"height", grid->height()}};
    for (const auto& r : scenario.rewards()) {
      const Cell c = grid->cell(r.state);
      rewards.push_back({{"x", c.x}, {"y", c.y}, {"value", r.value}});
    }
  } else {
    const auto& graph = *world.graph();
    json rows = json::array();
    for (StateId s = 0; s < graph.state_count(); ++s) {
      json row = json::array();
      for (ActionId a = 0; a < graph.action_count(); ++a) {
        const StateId t = graph.next(s, a);
        row.push_back(t == kUnavailable ? json(-1) : json(t));
      }
      rows.push_back(std::move(row));
    }
    doc["graph"] = {
        {"states", graph.state_count()}, {"actions", graph.action_count()}, {"next", rows}};
    for (const auto& r : scenario.rewards()) {
      rewards.push_back({{"state", r.state}, {"value", r.value}});
    }
  }
  doc["gamma"] = scenario.gamma();
  doc["rewards"] = std::move(rewards);
  return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  out << scenario_to_json(scenario);
  if (!out) throw std::runtime_error("failed writing scenario file " + path.string());
}

GenSpec parse_genspec(std::string_view json_text) {
  const json doc = parse_document(json_text);
  if (!doc.is_object()) throw FormatError("generator spec must be a JSON object");
  GenSpec spec;
  if (doc.contains("grid")) {
    spec.width = as_count(member(doc["grid"], "width", "grid"), "grid.width");
    spec.height = as_count(member(doc["grid"], "height", "grid"), "grid.height");
  }
  if (doc.contains("rewards")) spec.reward_count = as_count(doc["rewards"], "rewards");
  if (doc.contains("values")) {
    const json& range = doc["values"];
    if (!range.is_array() || range.size() != 2) throw FormatError("values must be [lo, hi]");
    spec.value_lo = as_real(range[0], "values[0]");
    spec.value_hi = as_real(range[1], "values[1]");
  }
  if (doc.contains("gamma")) spec.gamma = as_real(doc["gamma"], "gamma");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw FormatError("seed must be a nonnegative integer");
    spec.seed = doc["seed"].get<std::uint64_t>();
  }
  return spec;
}

std::string genspec_to_json(const GenSpec& spec) {
  const json doc = {{"grid", {{"width", spec.width}, {"height", spec.height}}},
                    {"rewards", spec.reward_count},
                    {"values", {spec.value_lo, spec.value_hi}},
                    {"gamma", spec.gamma},
                    {"seed", spec.seed}};
  return doc.dump(2) + "\n";
}

}  // namespace peakmdp
