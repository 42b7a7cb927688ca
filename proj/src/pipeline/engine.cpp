#include "geopulse/pipeline/engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "geopulse/core/error.h"
#include "geopulse/core/parallel.h"
#include "geopulse/geo/filters.h"
#include "geopulse/media/dedup.h"

namespace geopulse::pipeline {

using nlohmann::json;

std::size_t RunRecord::kept_count() const {
  return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& f) { return f.kept(); }));
}

std::vector<std::string> RunRecord::kept_ids() const {
  std::vector<std::string> out;
  for (const auto& f : items) {
    if (f.kept()) out.push_back(f.post_id);
  }
  return out;
}

const ComponentStats* RunRecord::stats(const std::string& name) const {
  for (const auto& s : components) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

media::ScorerBinding binding_for(const ComponentSpec& c) {
  media::ScorerBinding b;
  auto endpoint = c.string("endpoint");
  if (endpoint) {
    b.kind = media::ScorerKind::external;
    b.endpoint = endpoint;
    b.scorer_id = c.string("scorer_id").value_or(c.name);
  } else {
    b.kind = media::ScorerKind::builtin;
    b.scorer_id = c.component_id == "photo" ? media::kPhotoEntropy : media::kNsfwStub;
  }
  if (c.params.contains("timeout_ms")) b.timeout_ms = static_cast<int>(c.number("timeout_ms"));
  if (c.params.contains("on_failure")) {
    const auto& p = c.params["on_failure"];
    if (p.is_string()) b.on_failure = media::RejectItem{};
    else b.on_failure = p.get<double>();
  }
  b.validate();
  return b;
}

Engine::Engine(std::shared_ptr<const Corpus> corpus)
    : corpus_(std::move(corpus)),
      media_(corpus_->posts.size()),
      media_loaded_(corpus_->posts.size(), 0) {}

std::filesystem::path Engine::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : corpus_->root / p;
}

const Gazetteer& Engine::gazetteer(const std::string& path) {
  auto it = gazetteers_.find(path);
  if (it == gazetteers_.end()) {
    auto full = resolve(path);
    if (!std::filesystem::exists(full)) throw Error(ErrorCode::not_found, "gazetteer not found: " + full.string());
    it = gazetteers_.emplace(path, std::make_unique<Gazetteer>(load_gazetteer(full))).first;
  }
  return *it->second;
}

const std::vector<Region>& Engine::regions(const std::string& path) {
  auto it = regions_.find(path);
  if (it == regions_.end()) {
    auto full = resolve(path);
    if (!std::filesystem::exists(full)) throw Error(ErrorCode::not_found, "regions file not found: " + full.string());
    it = regions_.emplace(path, load_regions(full)).first;
  }
  return it->second;
}

void Engine::ensure_media(const std::vector<std::size_t>& items) {
  std::vector<std::size_t> todo;
  for (auto i : items) {
    if (!media_loaded_[i]) todo.push_back(i);
  }
  parallel_for(todo.size(), [&](std::size_t k) {
    std::size_t i = todo[k];
    Media& m = media_[i];
    for (const auto& ref : corpus_->posts[i].media) {
      try {
        std::string bytes = media::read_file_bytes(corpus_->media_path(ref));
        auto img = media::decode_pgm(bytes);
        m.hashes.push_back(media::dhash(img));
        m.images.push_back(std::move(img));
        m.encoded.push_back(std::move(bytes));
      } catch (const Error&) {
        m.undecodable = true;
      }
    }
  }, 64);
  for (auto i : todo) media_loaded_[i] = 1;
}

RunState Engine::initial_state() const {
  RunState s;
  s.fates.resize(corpus_->posts.size());
  s.alive.reserve(corpus_->posts.size());
  for (std::size_t i = 0; i < corpus_->posts.size(); ++i) {
    s.fates[i].post_id = corpus_->posts[i].id;
    s.alive.push_back(i);
  }
  return s;
}

namespace {

void add_flag(ItemFate& f, const std::string& flag) {
  if (std::find(f.flags.begin(), f.flags.end(), flag) == f.flags.end()) f.flags.push_back(flag);
}

std::string signature(const ComponentSpec& c, std::initializer_list<const char*> ignored) {
  json p = c.params;
  for (const char* k : ignored) p.erase(k);
  return c.component_id + "|" + c.name + "|" + p.dump();
}

void remove(RunState& s, std::size_t item, const ComponentSpec& c, json detail) {
  s.fates[item].removed_by = c.name;
  s.fates[item].detail = std::move(detail);
}

}  // namespace

void Engine::run_dedup(const ComponentSpec& c, RunState& s, ComponentStats& st) {
  ensure_media(s.alive);
  std::vector<media::DedupItem> items;
  items.reserve(s.alive.size());
  for (auto i : s.alive) {
    items.push_back({corpus_->posts[i].id, corpus_->posts[i].created_at, media_[i].hashes, media_[i].undecodable});
  }
  auto result = media::dedup(items, static_cast<int>(c.number("max_distance")));
  std::map<std::string, const media::DedupRemoval*> removed;
  for (const auto& r : result.removals) removed[r.removed_id] = &r;
  for (auto i : s.alive) {
    if (media_[i].undecodable) {
      add_flag(s.fates[i], "undecodable-media");
      ++st.flagged;
    }
    auto it = removed.find(corpus_->posts[i].id);
    if (it != removed.end()) {
      remove(s, i, c, {{"matched_kept_id", it->second->matched_kept_id}, {"distance", it->second->distance}});
    }
  }
}

void Engine::run_scorer(const PipelineConfig& cfg, const ComponentSpec& c, RunState& s, ComponentStats& st) {
  auto binding = binding_for(c);
  double threshold = c.number("threshold");
  auto direction = *media::parse_direction(*c.string("direction"));
  ensure_media(s.alive);

  auto& cache = score_cache_[signature(c, {"threshold", "direction"})];
  cache.resize(corpus_->posts.size());
  std::vector<std::size_t> todo;
  for (auto i : s.alive) {
    if (!cache[i] && !media_[i].undecodable) todo.push_back(i);
  }
  const bool builtin = binding.kind == media::ScorerKind::builtin;
  parallel_for(todo.size(), [&](std::size_t k) {
    std::size_t i = todo[k];
    const Media& m = media_[i];
    if (builtin) {
      media::ScoreOutcome out;
      out.scorer_id = binding.scorer_id;
      double score = 0.0;
      if (binding.scorer_id == media::kPhotoEntropy) {
        for (const auto& img : m.images) score = std::max(score, media::photo_score(img));
      }
      out.score = score;
      cache[i] = std::move(out);
    } else {
      media::ScoringItem item{corpus_->posts[i].id, corpus_->posts[i].text, m.images, m.encoded};
      cache[i] = media::score_with(binding, item);
    }
  }, builtin ? 256 : 1);

  for (auto i : s.alive) {
    auto& fate = s.fates[i];
    if (media_[i].undecodable) {
      add_flag(fate, "undecodable-media");
      ++st.flagged;
      continue;
    }
    const auto& out = *cache[i];
    if (out.failed()) ++st.scorer_failures;
    switch (out.status) {
      case media::ScoreStatus::protocol_error:
        add_flag(fate, "scorer-protocol-error:" + c.name);
        ++st.flagged;
        continue;
      case media::ScoreStatus::failed_reject:
        add_flag(fate, "scorer-failure:" + c.name);
        remove(s, i, c, {{"reason", "scorer failure, policy reject-item"}, {"message", out.message}});
        continue;
      case media::ScoreStatus::failed_default:
        add_flag(fate, "scorer-failure:" + c.name);
        break;
      case media::ScoreStatus::ok:
        break;
    }
    double score = out.score.value_or(0.0);
    fate.scores[c.name] = score;
    if (!media::passes(score, threshold, direction)) {
      remove(s, i, c, {{"score", score}, {"threshold", threshold}, {"direction", media::to_string(direction)}});
    }
  }
  double budget = cfg.failure_budget * static_cast<double>(s.alive.size());
  if (st.scorer_failures > 0 && static_cast<double>(st.scorer_failures) > budget) {
    throw Error(ErrorCode::engine, "component '" + c.name + "': " + std::to_string(st.scorer_failures) + " of " +
                                       std::to_string(s.alive.size()) + " scorer calls failed, over the failure budget (" +
                                       std::to_string(cfg.failure_budget) + " of input)");
  }
}

void Engine::run_geolocate(const ComponentSpec& c, RunState& s, ComponentStats&) {
  const Gazetteer& gaz = gazetteer(*c.string("gazetteer"));
  geo::GeocodeOptions opts;
  opts.weights.alpha = c.number("alpha");
  opts.weights.beta = c.number("beta");
  opts.max_tokens = static_cast<std::size_t>(c.number("max_tokens"));
  auto& cache = geo_cache_[signature(c, {"drop_unresolved"})];
  cache.resize(corpus_->posts.size());
  std::vector<std::size_t> todo;
  for (auto i : s.alive) {
    if (!cache[i]) todo.push_back(i);
  }
  parallel_for(todo.size(), [&](std::size_t k) {
    cache[todo[k]] = geo::geocode(corpus_->posts[todo[k]], gaz, opts);
  }, 64);
  bool drop = c.flag("drop_unresolved");
  for (auto i : s.alive) {
    s.fates[i].resolution = *cache[i];
    if (!s.fates[i].resolution && drop) remove(s, i, c, {{"reason", "no location resolved"}});
  }
}

void Engine::run_geometry(const ComponentSpec& c, RunState& s, ComponentStats& st) {
  const auto& monitored = regions(*c.string("regions"));
  std::vector<geo::GeoResolution> res;
  std::vector<std::size_t> owners;
  for (auto i : s.alive) {
    if (s.fates[i].resolution) {
      res.push_back(*s.fates[i].resolution);
      owners.push_back(i);
    } else {
      remove(s, i, c, {{"reason", "no location resolved"}});
    }
  }
  auto result = geo::geometry_filter(res, monitored);
  std::vector<char> keep(res.size(), 0);
  for (auto k : result.kept) keep[k] = 1;
  for (std::size_t k = 0; k < res.size(); ++k) {
    if (!keep[k]) remove(s, owners[k], c, {{"reason", "outside monitored regions"}});
  }
  for (auto& w : result.warnings) {
    spdlog::warn("{}: {}", c.name, w);
    st.warnings.push_back(w);
  }
}

void Engine::run_density(const ComponentSpec& c, RunState& s, ComponentStats&) {
  std::vector<GeoPoint> points;
  std::vector<std::size_t> owners;
  for (auto i : s.alive) {
    if (s.fates[i].resolution) {
      points.push_back(s.fates[i].resolution->primary_point());
      owners.push_back(i);
    } else {
      remove(s, i, c, {{"reason", "no location resolved"}});
    }
  }
  auto kept = geo::density_filter(points, c.number("eps_km"), static_cast<std::size_t>(c.number("min_pts")));
  std::vector<char> keep(points.size(), 0);
  for (auto k : kept) keep[k] = 1;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!keep[k]) remove(s, owners[k], c, {{"reason", "isolated location"}});
  }
}

void Engine::apply(const PipelineConfig& config, std::size_t index, RunState& s) {
  const ComponentSpec& c = config.components.at(index);
  ComponentStats st;
  st.name = c.name;
  st.component_id = c.component_id;
  st.input = s.alive.size();
  auto t0 = std::chrono::steady_clock::now();
  if (c.component_id == "dedup") run_dedup(c, s, st);
  else if (c.component_id == "photo" || c.component_id == "nsfw" || c.component_id == "external") run_scorer(config, c, s, st);
  else if (c.component_id == "geolocate") run_geolocate(c, s, st);
  else if (c.component_id == "geometry") run_geometry(c, s, st);
  else if (c.component_id == "density") run_density(c, s, st);
  else throw Error(ErrorCode::contract, "no executor for component '" + c.component_id + "'");
  auto t1 = std::chrono::steady_clock::now();

  std::vector<std::size_t> next;
  next.reserve(s.alive.size());
  for (auto i : s.alive) {
    if (s.fates[i].kept()) next.push_back(i);
  }
  st.passed = next.size();
  st.removed = st.input - st.passed;
  st.selectivity = st.input == 0 ? 1.0 : static_cast<double>(st.passed) / static_cast<double>(st.input);
  st.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  st.mean_cost_ms = st.input == 0 ? 0.0 : st.elapsed_ms / static_cast<double>(st.input);
  for (const auto& w : st.warnings) s.warnings.push_back(c.name + ": " + w);
  s.alive = std::move(next);
  s.stats.push_back(std::move(st));
}

RunRecord Engine::finish(const PipelineConfig& config, RunState s) const {
  RunRecord r;
  r.config = config;
  r.items = std::move(s.fates);
  r.components = std::move(s.stats);
  r.warnings = std::move(s.warnings);
  return r;
}

RunRecord Engine::run(const PipelineConfig& config) {
  validate(config);
  RunState s = initial_state();
  for (std::size_t i = 0; i < config.components.size(); ++i) apply(config, i, s);
  return finish(config, std::move(s));
}

nlohmann::json to_json(const ItemFate& f) {
  json j = {{"post_id", f.post_id}, {"fate", f.kept() ? "kept" : "removed"}};
  if (f.removed_by) j["removed_by"] = *f.removed_by;
  if (!f.detail.is_null()) j["detail"] = f.detail;
  j["flags"] = f.flags;
  j["scores"] = f.scores;
  j["resolution"] = f.resolution ? geo::to_json(*f.resolution) : json(nullptr);
  return j;
}

ItemFate fate_from_json(const nlohmann::json& j) {
  ItemFate f;
  f.post_id = j.at("post_id").get<std::string>();
  if (j.contains("removed_by")) f.removed_by = j["removed_by"].get<std::string>();
  if (j.contains("detail")) f.detail = j["detail"];
  f.flags = j.value("flags", std::vector<std::string>{});
  f.scores = j.value("scores", std::map<std::string, double>{});
  if (j.contains("resolution") && !j["resolution"].is_null()) f.resolution = geo::resolution_from_json(j["resolution"]);
  return f;
}

nlohmann::json to_json(const ComponentStats& s) {
  return {{"name", s.name},
          {"component_id", s.component_id},
          {"input", s.input},
          {"passed", s.passed},
          {"removed", s.removed},
          {"flagged", s.flagged},
          {"scorer_failures", s.scorer_failures},
          {"selectivity", s.selectivity},
          {"elapsed_ms", s.elapsed_ms},
          {"mean_cost_ms", s.mean_cost_ms},
          {"warnings", s.warnings}};
}

ComponentStats stats_from_json(const nlohmann::json& j) {
  ComponentStats s;
  s.name = j.at("name").get<std::string>();
  s.component_id = j.at("component_id").get<std::string>();
  s.input = j.at("input").get<std::size_t>();
  s.passed = j.at("passed").get<std::size_t>();
  s.removed = j.value("removed", s.input - s.passed);
  s.flagged = j.value("flagged", std::size_t{0});
  s.scorer_failures = j.value("scorer_failures", std::size_t{0});
  s.selectivity = j.at("selectivity").get<double>();
  s.elapsed_ms = j.value("elapsed_ms", 0.0);
  s.mean_cost_ms = j.value("mean_cost_ms", 0.0);
  s.warnings = j.value("warnings", std::vector<std::string>{});
  return s;
}

}  // namespace geopulse::pipeline
