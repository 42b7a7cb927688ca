#include "geopulse/pipeline/config.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>

#include "geopulse/core/error.h"
#include "geopulse/media/scoring.h"

namespace geopulse::pipeline {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::validation, msg); }

std::vector<ParamSchema> scorer_params(const char* direction, bool external) {
  std::vector<ParamSchema> p;
  if (external) {
    p.push_back({"scorer_id", ParamType::string, nullptr, {}, {}, true, "scorer identifier recorded as provenance"});
  }
  p.push_back({"threshold", ParamType::number, 0.5, 0.0, 1.0, false, "confidence threshold"});
  p.push_back({"direction", ParamType::direction, direction, {}, {}, false, "keep-if-ge or keep-if-le"});
  p.push_back({"endpoint", ParamType::string, nullptr, {}, {}, external,
               external ? "scorer URL" : "optional external scorer replacing the builtin"});
  p.push_back({"timeout_ms", ParamType::integer, 2000, 1.0, 600000.0, false, "external scorer timeout"});
  p.push_back({"on_failure", ParamType::failure_policy, 0.0, {}, {}, false,
               "score in [0,1] applied on scorer failure, or \"reject-item\""});
  return p;
}

std::vector<ComponentDescriptor> make_registry() {
  std::vector<ComponentDescriptor> r;
  r.push_back({"dedup", media::kDhashDedup, "near-duplicate image removal (dHash, Hamming distance)",
               {{"max_distance", ParamType::integer, 10, 0.0, 64.0, false, "max Hamming distance of a duplicate"}},
               true, false});
  r.push_back({"photo", media::kPhotoEntropy, "non-photo removal (histogram entropy / 8)",
               scorer_params("keep-if-ge", false), false, false});
  r.push_back({"nsfw", media::kNsfwStub, "not-safe-for-work removal (builtin stub scores 0)",
               scorer_params("keep-if-le", false), false, false});
  r.push_back({"external", "external", "threshold filter over an external HTTP scorer",
               scorer_params("keep-if-ge", true), false, false});
  r.push_back({"geolocate", "geolocate", "toponym extraction and disambiguation against the gazetteer",
               {{"alpha", ParamType::number, 1.0, 0.0, {}, false, "weight of mean pairwise distance"},
                {"beta", ParamType::number, 0.5, 0.0, {}, false, "weight of mean admin penalty"},
                {"max_tokens", ParamType::integer, 3, 1.0, 5.0, false, "longest n-gram matched"},
                {"drop_unresolved", ParamType::boolean, true, {}, {}, false, "remove posts with no location"},
                {"gazetteer", ParamType::string, "gazetteer.csv", {}, {}, false, "path, relative to the corpus"}},
               false, false});
  r.push_back({"geometry", "geometry", "keep posts located inside monitored regions",
               {{"regions", ParamType::string, "regions.csv", {}, {}, false, "path, relative to the corpus"}},
               false, true});
  r.push_back({"density", "density", "drop isolated locations (neighbors within eps_km)",
               {{"eps_km", ParamType::number, 50.0, 0.0, {}, false, "neighborhood radius"},
                {"min_pts", ParamType::integer, 3, 1.0, {}, false, "neighbors required, self included"}},
               true, true});
  return r;
}

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::number: return "number";
    case ParamType::integer: return "integer";
    case ParamType::boolean: return "boolean";
    case ParamType::string: return "string";
    case ParamType::direction: return "direction";
    case ParamType::failure_policy: return "failure_policy";
  }
  return "unknown";
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) invalid("unknown key '" + k + "' in " + where);
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

json check_param(const ParamSchema& p, const json& v, const std::string& comp) {
  const std::string where = "component '" + comp + "': parameter '" + p.name + "'";
  switch (p.type) {
    case ParamType::number:
    case ParamType::integer: {
      if (!v.is_number()) invalid(where + " must be a " + std::string(type_name(p.type)));
      double d = v.get<double>();
      if (!std::isfinite(d)) invalid(where + " must be finite");
      if (p.type == ParamType::integer && d != std::floor(d)) invalid(where + " must be an integer");
      bool below = p.min && d < *p.min;
      bool above = p.max && d > *p.max;
      if (below || above) {
        std::string range = "[" + (p.min ? fmt(*p.min) : std::string("-inf")) + "," +
                            (p.max ? fmt(*p.max) : std::string("inf")) + "]";
        invalid(where + " value " + fmt(d) + " out of range " + range);
      }
      if (p.name == "eps_km" && d <= 0.0) invalid(where + " must be positive");
      return p.type == ParamType::integer ? json(static_cast<std::int64_t>(d)) : json(d);
    }
    case ParamType::boolean:
      if (!v.is_boolean()) invalid(where + " must be a boolean");
      return v;
    case ParamType::string:
      if (!v.is_string() || v.get<std::string>().empty()) invalid(where + " must be a non-empty string");
      if (p.name == "endpoint" && v.get<std::string>().rfind("http://", 0) != 0) {
        invalid(where + " must be an http:// URL");
      }
      return v;
    case ParamType::direction:
      if (!v.is_string() || !media::parse_direction(v.get<std::string>())) {
        invalid(where + " must be \"keep-if-ge\" or \"keep-if-le\"");
      }
      return media::to_string(*media::parse_direction(v.get<std::string>()));
    case ParamType::failure_policy:
      if (v.is_string() && v.get<std::string>() == "reject-item") return v;
      if (v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0) return json(v.get<double>());
      invalid(where + " must be a score in [0,1] or \"reject-item\"");
  }
  invalid(where + " has an unknown type");
}

ComponentSpec parse_component(const json& j, std::size_t index) {
  const std::string where = "components[" + std::to_string(index) + "]";
  check_keys(j, {"component_id", "name", "params", "pinned", "precedence"}, where);
  if (!j.contains("component_id") || !j["component_id"].is_string()) invalid(where + ": missing component_id");
  ComponentSpec c;
  c.component_id = j["component_id"].get<std::string>();
  const auto* desc = find_component(c.component_id);
  if (!desc) {
    std::string known;
    for (const auto& d : component_registry()) known += (known.empty() ? "" : ", ") + d.component_id;
    invalid(where + ": unknown component_id '" + c.component_id + "' (registered: " + known + ")");
  }
  c.name = c.component_id;
  if (j.contains("name")) {
    if (!j["name"].is_string() || j["name"].get<std::string>().empty()) invalid(where + ": name must be a non-empty string");
    c.name = j["name"].get<std::string>();
  }
  c.pinned = desc->pinned_by_default;
  if (j.contains("pinned")) {
    if (!j["pinned"].is_boolean()) invalid("component '" + c.name + "': pinned must be a boolean");
    c.pinned = j["pinned"].get<bool>();
  }
  if (j.contains("precedence")) {
    if (!j["precedence"].is_array()) invalid("component '" + c.name + "': precedence must be a list of names");
    for (const auto& p : j["precedence"]) {
      if (!p.is_string()) invalid("component '" + c.name + "': precedence entries must be strings");
      c.precedence.push_back(p.get<std::string>());
    }
  }
  json given = j.value("params", json::object());
  if (!given.is_object()) invalid("component '" + c.name + "': params must be an object");
  for (const auto& [k, _] : given.items()) {
    bool known = false;
    for (const auto& p : desc->params) known = known || p.name == k;
    if (!known) invalid("unknown key '" + k + "' in params of component '" + c.name + "'");
  }
  c.params = json::object();
  for (const auto& p : desc->params) {
    if (given.contains(p.name)) {
      c.params[p.name] = check_param(p, given[p.name], c.name);
    } else if (p.required) {
      invalid("component '" + c.name + "': missing required parameter '" + p.name + "'");
    } else if (!p.default_value.is_null()) {
      c.params[p.name] = p.default_value;
    }
  }
  return c;
}

}  // namespace

std::span<const ComponentDescriptor> component_registry() {
  static const std::vector<ComponentDescriptor> registry = make_registry();
  return registry;
}

const ComponentDescriptor* find_component(std::string_view component_id) {
  for (const auto& d : component_registry()) {
    if (d.component_id == component_id) return &d;
  }
  return nullptr;
}

nlohmann::json to_json(const ComponentDescriptor& d) {
  json params = json::array();
  for (const auto& p : d.params) {
    json jp = {{"name", p.name}, {"type", type_name(p.type)}, {"required", p.required},
               {"default", p.default_value}, {"description", p.description}};
    if (p.min) jp["min"] = *p.min;
    if (p.max) jp["max"] = *p.max;
    params.push_back(jp);
  }
  return {{"component_id", d.component_id},
          {"implementation", d.implementation},
          {"description", d.description},
          {"pinned_by_default", d.pinned_by_default},
          {"requires_geolocation", d.requires_geolocation},
          {"params", params}};
}

double ComponentSpec::number(const std::string& key) const {
  if (!params.contains(key) || !params[key].is_number()) {
    throw Error(ErrorCode::contract, "component '" + name + "' has no numeric parameter '" + key + "'");
  }
  return params[key].get<double>();
}

std::optional<std::string> ComponentSpec::string(const std::string& key) const {
  if (!params.contains(key) || !params[key].is_string()) return std::nullopt;
  return params[key].get<std::string>();
}

bool ComponentSpec::flag(const std::string& key) const {
  return params.contains(key) && params[key].is_boolean() && params[key].get<bool>();
}

const ComponentSpec* PipelineConfig::find(std::string_view n) const {
  for (const auto& c : components) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

std::optional<std::size_t> PipelineConfig::index_of(std::string_view n) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].name == n) return i;
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, std::size_t>> PipelineConfig::precedence_pairs() const {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (const auto& p : components[i].precedence) {
      if (auto j = index_of(p)) pairs.insert({*j, i});
    }
    const auto* desc = find_component(components[i].component_id);
    if (desc && desc->requires_geolocation) {
      for (std::size_t j = 0; j < components.size(); ++j) {
        if (components[j].component_id == "geolocate") pairs.insert({j, i});
      }
    }
  }
  return {pairs.begin(), pairs.end()};
}

void validate(const PipelineConfig& c) {
  if (!(c.failure_budget >= 0.0 && c.failure_budget <= 1.0)) {
    invalid("failure_budget " + fmt(c.failure_budget) + " out of range [0,1]");
  }
  std::set<std::string> names;
  bool has_geolocate = false;
  for (const auto& comp : c.components) {
    if (!names.insert(comp.name).second) invalid("duplicate component name '" + comp.name + "'");
    has_geolocate = has_geolocate || comp.component_id == "geolocate";
  }
  for (const auto& comp : c.components) {
    for (const auto& p : comp.precedence) {
      if (!names.count(p)) invalid("component '" + comp.name + "': precedence references unknown component '" + p + "'");
      if (p == comp.name) invalid("precedence cycle: " + p + " -> " + p);
    }
    const auto* desc = find_component(comp.component_id);
    if (!desc) invalid("unknown component_id '" + comp.component_id + "'");
    if (desc->requires_geolocation && !has_geolocate) {
      invalid("component '" + comp.name + "' needs a geolocate component earlier in the pipeline");
    }
  }
  for (const auto& [name, cost] : c.cost_model) {
    if (!names.count(name)) invalid("cost_model references unknown component '" + name + "'");
    if (!(cost.cost_ms >= 0.0) || !std::isfinite(cost.cost_ms)) invalid("cost_model '" + name + "': cost_ms must be >= 0");
    if (cost.selectivity && !(*cost.selectivity >= 0.0 && *cost.selectivity <= 1.0)) {
      invalid("cost_model '" + name + "': selectivity out of range [0,1]");
    }
  }
  for (const auto* q : {&c.quality.min_precision, &c.quality.min_recall}) {
    if (*q && !(**q >= 0.0 && **q <= 1.0)) invalid("quality constraint out of range [0,1]");
  }

  // Cycle detection over explicit + implied edges (DFS, reports the cycle).
  const std::size_t n = c.components.size();
  std::vector<std::vector<std::size_t>> after(n);
  auto pairs = c.precedence_pairs();
  for (auto [a, b] : pairs) after[a].push_back(b);
  std::vector<int> state(n, 0);
  std::vector<std::size_t> stack;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    state[v] = 1;
    stack.push_back(v);
    for (auto w : after[v]) {
      if (state[w] == 1) {
        std::string cycle;
        auto it = std::find(stack.begin(), stack.end(), w);
        for (; it != stack.end(); ++it) cycle += c.components[*it].name + " -> ";
        invalid("precedence cycle: " + cycle + c.components[w].name);
      }
      if (state[w] == 0) visit(w);
    }
    stack.pop_back();
    state[v] = 2;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (state[v] == 0) visit(v);
  }
  for (auto [a, b] : pairs) {
    if (a > b) {
      invalid("component '" + c.components[b].name + "' must run after '" + c.components[a].name + "'");
    }
  }
}

PipelineConfig parse_config_json(const nlohmann::json& j) {
  check_keys(j, {"name", "corpus", "sample", "exclude_reposts", "failure_budget", "components", "cost_model",
                 "quality"},
             "pipeline config");
  PipelineConfig c;
  try {
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (j.contains("corpus")) c.corpus = j["corpus"].get<std::string>();
    if (j.contains("sample")) c.sample = j["sample"].get<std::string>();
    if (j.contains("exclude_reposts")) c.exclude_reposts = j["exclude_reposts"].get<bool>();
    if (j.contains("failure_budget")) c.failure_budget = j["failure_budget"].get<double>();
  } catch (const json::exception& e) {
    invalid(std::string("pipeline config: wrong value type: ") + e.what());
  }
  if (j.contains("components")) {
    if (!j["components"].is_array()) invalid("components must be a list");
    for (std::size_t i = 0; i < j["components"].size(); ++i) {
      c.components.push_back(parse_component(j["components"][i], i));
    }
  }
  if (j.contains("cost_model")) {
    if (!j["cost_model"].is_object()) invalid("cost_model must be an object");
    for (const auto& [name, v] : j["cost_model"].items()) {
      check_keys(v, {"cost_ms", "selectivity"}, "cost_model '" + name + "'");
      if (!v.contains("cost_ms") || !v["cost_ms"].is_number()) invalid("cost_model '" + name + "': cost_ms must be a number");
      DeclaredCost dc;
      dc.cost_ms = v["cost_ms"].get<double>();
      if (v.contains("selectivity")) {
        if (!v["selectivity"].is_number()) invalid("cost_model '" + name + "': selectivity must be a number");
        dc.selectivity = v["selectivity"].get<double>();
      }
      c.cost_model[name] = dc;
    }
  }
  if (j.contains("quality")) {
    check_keys(j["quality"], {"min_precision", "min_recall"}, "quality");
    for (const char* k : {"min_precision", "min_recall"}) {
      if (!j["quality"].contains(k)) continue;
      if (!j["quality"][k].is_number()) invalid(std::string("quality.") + k + " must be a number");
      (std::string(k) == "min_precision" ? c.quality.min_precision : c.quality.min_recall) =
          j["quality"][k].get<double>();
    }
  }
  validate(c);
  return c;
}

PipelineConfig parse_config(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::validation, std::string("pipeline config is not valid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::not_found, "pipeline config not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

nlohmann::json to_json(const PipelineConfig& c) {
  json j = {{"name", c.name}, {"exclude_reposts", c.exclude_reposts}, {"failure_budget", c.failure_budget}};
  if (c.corpus) j["corpus"] = *c.corpus;
  if (c.sample) j["sample"] = *c.sample;
  json comps = json::array();
  for (const auto& comp : c.components) {
    comps.push_back({{"component_id", comp.component_id},
                     {"name", comp.name},
                     {"params", comp.params},
                     {"pinned", comp.pinned},
                     {"precedence", comp.precedence}});
  }
  j["components"] = comps;
  json costs = json::object();
  for (const auto& [name, dc] : c.cost_model) {
    costs[name] = {{"cost_ms", dc.cost_ms}};
    if (dc.selectivity) costs[name]["selectivity"] = *dc.selectivity;
  }
  j["cost_model"] = costs;
  json q = json::object();
  if (c.quality.min_precision) q["min_precision"] = *c.quality.min_precision;
  if (c.quality.min_recall) q["min_recall"] = *c.quality.min_recall;
  j["quality"] = q;
  return j;
}

std::string serialize(const PipelineConfig& c) { return to_json(c).dump(2); }

PipelineConfig with_param(const PipelineConfig& c, const std::string& component, const std::string& param,
                          const nlohmann::json& value) {
  auto idx = c.index_of(component);
  if (!idx) throw Error(ErrorCode::not_found, "no component named '" + component + "'");
  auto j = to_json(c);
  j["components"][*idx]["params"][param] = value;
  return parse_config_json(j);
}

PipelineConfig reordered(const PipelineConfig& c, std::span<const std::string> order) {
  if (order.size() != c.components.size()) {
    throw Error(ErrorCode::invalid_argument, "reorder: order must list every component exactly once");
  }
  PipelineConfig out = c;
  out.components.clear();
  std::set<std::string> seen;
  for (const auto& name : order) {
    const auto* comp = c.find(name);
    if (!comp || !seen.insert(name).second) {
      throw Error(ErrorCode::invalid_argument, "reorder: bad or repeated component '" + name + "'");
    }
    out.components.push_back(*comp);
  }
  validate(out);
  return out;
}

}  // namespace geopulse::pipeline
