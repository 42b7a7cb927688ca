#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/core/corpus.h"
#include "geopulse/core/gazetteer.h"
#include "geopulse/core/region.h"
#include "geopulse/geo/disambiguate.h"
#include "geopulse/media/dhash.h"
#include "geopulse/media/image.h"
#include "geopulse/media/scoring.h"
#include "geopulse/pipeline/config.h"

namespace geopulse::pipeline {

struct ItemFate {
  std::string post_id;
  std::optional<std::string> removed_by;  // component name
  nlohmann::json detail;                  // removal evidence, null if kept
  std::vector<std::string> flags;
  std::map<std::string, double> scores;   // by component name
  std::optional<geo::GeoResolution> resolution;

  bool kept() const { return !removed_by.has_value(); }
};

struct ComponentStats {
  std::string name;
  std::string component_id;
  std::size_t input = 0;
  std::size_t passed = 0;
  std::size_t removed = 0;
  std::size_t flagged = 0;
  std::size_t scorer_failures = 0;
  double selectivity = 1.0;  // passed / input, 1 on empty input
  double elapsed_ms = 0.0;
  double mean_cost_ms = 0.0;  // elapsed / input
  std::vector<std::string> warnings;
};

struct RunRecord {
  std::string run_id;
  PipelineConfig config;
  std::vector<ItemFate> items;  // corpus order
  std::vector<ComponentStats> components;
  std::vector<std::string> warnings;

  std::size_t total() const { return items.size(); }
  std::size_t kept_count() const;
  std::vector<std::string> kept_ids() const;
  const ComponentStats* stats(const std::string& name) const;
};

// Mutable state threaded through the components of one run.
struct RunState {
  std::vector<std::size_t> alive;  // indices into the corpus, ascending
  std::vector<ItemFate> fates;
  std::vector<ComponentStats> stats;
  std::vector<std::string> warnings;
};

// Executes pipelines over one corpus. Decoded media, hashes, scores and
// resolutions are cached across runs, so sweeps only pay for what changes.
// Not safe for concurrent use; create one engine per thread.
class Engine {
 public:
  explicit Engine(std::shared_ptr<const Corpus> corpus);

  const Corpus& corpus() const { return *corpus_; }

  RunRecord run(const PipelineConfig& config);

  RunState initial_state() const;
  void apply(const PipelineConfig& config, std::size_t index, RunState& state);
  RunRecord finish(const PipelineConfig& config, RunState state) const;

 private:
  struct Media {
    std::vector<media::LuminanceImage> images;
    std::vector<std::string> encoded;
    std::vector<media::PerceptualHash> hashes;
    bool undecodable = false;
  };

  void ensure_media(const std::vector<std::size_t>& items);
  const Gazetteer& gazetteer(const std::string& path);
  const std::vector<Region>& regions(const std::string& path);
  std::filesystem::path resolve(const std::string& path) const;

  void run_dedup(const ComponentSpec& c, RunState& s, ComponentStats& st);
  void run_scorer(const PipelineConfig& cfg, const ComponentSpec& c, RunState& s, ComponentStats& st);
  void run_geolocate(const ComponentSpec& c, RunState& s, ComponentStats& st);
  void run_geometry(const ComponentSpec& c, RunState& s, ComponentStats& st);
  void run_density(const ComponentSpec& c, RunState& s, ComponentStats& st);

  std::shared_ptr<const Corpus> corpus_;
  std::vector<Media> media_;
  std::vector<char> media_loaded_;
  std::map<std::string, std::unique_ptr<Gazetteer>> gazetteers_;
  std::map<std::string, std::vector<Region>> regions_;
  std::map<std::string, std::vector<std::optional<media::ScoreOutcome>>> score_cache_;
  std::map<std::string, std::vector<std::optional<std::optional<geo::GeoResolution>>>> geo_cache_;
};

// Binding a scoring component resolves to: builtin unless an endpoint is set.
media::ScorerBinding binding_for(const ComponentSpec& c);

nlohmann::json to_json(const ItemFate& f);
ItemFate fate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComponentStats& s);
ComponentStats stats_from_json(const nlohmann::json& j);

}  // namespace geopulse::pipeline
