#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace geopulse::pipeline {

enum class ParamType { number, integer, boolean, string, direction, failure_policy };

struct ParamSchema {
  std::string name;
  ParamType type = ParamType::number;
  nlohmann::json default_value;  // null when required or optional without default
  std::optional<double> min;
  std::optional<double> max;
  bool required = false;
  std::string description;
};

struct ComponentDescriptor {
  std::string component_id;
  std::string implementation;  // builtin scorer or algorithm id
  std::string description;
  std::vector<ParamSchema> params;
  bool pinned_by_default = false;
  bool requires_geolocation = false;
};

std::span<const ComponentDescriptor> component_registry();
const ComponentDescriptor* find_component(std::string_view component_id);
nlohmann::json to_json(const ComponentDescriptor& d);

struct ComponentSpec {
  std::string name;          // instance id, unique in the config
  std::string component_id;  // registered component
  nlohmann::json params = nlohmann::json::object();  // defaults filled in
  bool pinned = false;
  std::vector<std::string> precedence;  // names that must run earlier

  double number(const std::string& key) const;
  std::optional<std::string> string(const std::string& key) const;
  bool flag(const std::string& key) const;

  friend bool operator==(const ComponentSpec&, const ComponentSpec&) = default;
};

struct DeclaredCost {
  double cost_ms = 0.0;
  std::optional<double> selectivity;
  friend bool operator==(const DeclaredCost&, const DeclaredCost&) = default;
};

struct QualityConstraints {
  std::optional<double> min_precision;
  std::optional<double> min_recall;
  friend bool operator==(const QualityConstraints&, const QualityConstraints&) = default;
};

struct PipelineConfig {
  std::string name = "pipeline";
  std::optional<std::string> corpus;
  std::optional<std::string> sample;
  bool exclude_reposts = true;
  double failure_budget = 0.1;  // fraction of a component's input
  std::vector<ComponentSpec> components;
  std::map<std::string, DeclaredCost> cost_model;  // by component name
  QualityConstraints quality;

  const ComponentSpec* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  // (earlier, later) index pairs, explicit and implied.
  std::vector<std::pair<std::size_t, std::size_t>> precedence_pairs() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Strict: unknown keys, unregistered components, out-of-range values,
// precedence cycles and order violations throw Error(validation).
PipelineConfig parse_config(std::string_view bytes);
PipelineConfig parse_config_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& c);
std::string serialize(const PipelineConfig& c);
void validate(const PipelineConfig& c);

// Copy of c with one parameter replaced, validated.
PipelineConfig with_param(const PipelineConfig& c, const std::string& component, const std::string& param,
                          const nlohmann::json& value);

// Copy of c with components rearranged to `order` (names).
PipelineConfig reordered(const PipelineConfig& c, std::span<const std::string> order);

}  // namespace geopulse::pipeline
