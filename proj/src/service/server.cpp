#include "geopulse/service/server.h"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <regex>

#include "geopulse/aggregate/aggregate.h"
#include "geopulse/aggregate/choropleth.h"
#include "geopulse/aggregate/spearman.h"
#include "geopulse/core/error.h"
#include "geopulse/core/events.h"
#include "geopulse/core/sample.h"
#include "geopulse/pipeline/config.h"
#include "geopulse/pipeline/engine.h"
#include "geopulse/pipeline/metrics.h"
#include "geopulse/pipeline/optimizer.h"
#include "geopulse/pipeline/run_io.h"
#include "geopulse/pipeline/suggest.h"
#include "geopulse/pipeline/sweep.h"
#include "geopulse/synth/generator.h"
#include "geopulse/trigger/dictionary.h"
#include "geopulse/trigger/loeo.h"
#include "geopulse/trigger/term_series.h"

namespace geopulse::service {

using nlohmann::json;

std::pair<int, nlohmann::json> error_response(const std::exception& e) {
  int status = 500;
  std::string code = "internal";
  if (const auto* h = dynamic_cast<const HttpError*>(&e)) {
    status = h->status();
    code = h->code();
  } else if (const auto* g = dynamic_cast<const Error*>(&e)) {
    switch (g->code()) {
      case ErrorCode::not_found: status = 404; code = "not_found"; break;
      case ErrorCode::validation:
      case ErrorCode::parse: status = 422; code = "validation_error"; break;
      case ErrorCode::invalid_argument: status = 400; code = "invalid_request"; break;
      case ErrorCode::engine: status = 500; code = "engine_error"; break;
      case ErrorCode::io: status = 500; code = "io_error"; break;
      case ErrorCode::contract: status = 500; code = "internal"; break;
    }
  }
  return {status, {{"error", {{"code", code}, {"message", e.what()}}}}};
}

namespace {

void check_id(const std::string& id, const char* what) {
  static const std::regex ok("[A-Za-z0-9][A-Za-z0-9_.-]*");
  if (!std::regex_match(id, ok) || id.find("..") != std::string::npos) {
    throw HttpError(400, "invalid_request", std::string("invalid ") + what + " '" + id + "'");
  }
}

std::string require_string(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    throw HttpError(400, "invalid_request", std::string("missing string field '") + key + "'");
  }
  return body[key].get<std::string>();
}

std::string query_or(const Query& q, const std::string& key, const std::string& fallback) {
  auto it = q.find(key);
  return it == q.end() || it->second.empty() ? fallback : it->second;
}

std::string require_query(const Query& q, const std::string& key) {
  auto v = query_or(q, key, "");
  if (v.empty()) throw HttpError(400, "invalid_request", "missing query parameter '" + key + "'");
  return v;
}

pipeline::PipelineConfig body_config(const json& body) {
  if (!body.contains("config")) throw HttpError(422, "invalid_config", "missing field 'config'");
  try {
    const auto& c = body["config"];
    return c.is_string() ? pipeline::parse_config(c.get<std::string>()) : pipeline::parse_config_json(c);
  } catch (const Error& e) {
    throw HttpError(422, "invalid_config", e.what());
  }
}

Seconds parse_bucket_width(const std::string& s) {
  if (s == "hour" || s == "day") return aggregate::parse_bucket(s);
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used == s.size() && v > 0) return Seconds{v};
  } catch (const std::exception&) {
  }
  throw HttpError(400, "invalid_request", "bucket must be hour, day or a positive number of seconds");
}

Timestamp query_time(const std::string& s, const char* what) {
  auto t = try_parse_timestamp(s);
  if (!t) throw HttpError(400, "invalid_request", std::string("'") + what + "' is not an ISO-8601 timestamp");
  return *t;
}

json event_json(const EventRecord& e) {
  return {{"event_id", e.event_id}, {"event_type", e.event_type}, {"country", e.country},
          {"start", format_timestamp(e.start)}, {"end", format_timestamp(e.end)}, {"name", e.name}};
}


}  // namespace

Service::Service(ServiceOptions options)
    : options_(std::move(options)), registry_(options_.data_root / "runs") {
  std::filesystem::create_directories(options_.data_root / "corpora");
  std::filesystem::create_directories(options_.data_root / "dictionaries");
  for (std::size_t i = 0; i < std::max<std::size_t>(1, options_.workers); ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

Service::~Service() {
  stop();
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) t.join();
}

std::filesystem::path Service::corpus_dir(const std::string& corpus_id) const {
  check_id(corpus_id, "corpus_id");
  auto dir = options_.data_root / "corpora" / corpus_id;
  if (!std::filesystem::is_directory(dir)) throw HttpError(404, "not_found", "unknown corpus '" + corpus_id + "'");
  return dir;
}

std::shared_ptr<const Corpus> Service::corpus(const std::string& corpus_id, bool exclude_reposts) {
  auto dir = corpus_dir(corpus_id);
  std::string key = corpus_id + (exclude_reposts ? "|x" : "|r");
  std::lock_guard lock(corpus_mutex_);
  auto it = corpora_.find(key);
  if (it != corpora_.end()) return it->second;
  ParseOptions opts;
  opts.exclude_reposts = exclude_reposts;
  auto c = std::make_shared<const Corpus>(load_corpus(dir, opts));
  corpora_.emplace(key, c);
  return c;
}

std::string Service::default_corpus_id(const Query& query) const {
  auto id = query_or(query, "corpus_id", "");
  if (!id.empty()) return id;
  std::vector<std::string> ids;
  for (const auto& d : std::filesystem::directory_iterator(options_.data_root / "corpora")) {
    if (d.is_directory()) ids.push_back(d.path().filename().string());
  }
  if (ids.size() == 1) return ids.front();
  throw HttpError(400, "invalid_request", "corpus_id is required when the data root holds " +
                                              std::to_string(ids.size()) + " corpora");
}

json Service::components() const {
  json list = json::array();
  for (const auto& d : pipeline::component_registry()) list.push_back(pipeline::to_json(d));
  return {{"components", list},
          {"builtin_scorers", {media::kDhashDedup, media::kPhotoEntropy, media::kNsfwStub, "geolocate"}}};
}

json Service::evaluate(const json& body) {
  auto cfg = body_config(body);
  auto corpus_id = require_string(body, "corpus_id");
  auto sample_id = body.value("sample_id", std::string("sample"));
  check_id(sample_id, "sample_id");
  auto c = corpus(corpus_id, cfg.exclude_reposts);
  auto sample_path = c->root / (sample_id + ".csv");
  if (!std::filesystem::exists(sample_path)) throw HttpError(404, "not_found", "unknown sample '" + sample_id + "'");
  auto sample = load_sample(sample_path, c->post_ids());
  pipeline::Engine engine(c);
  auto run = engine.run(cfg);
  return pipeline::to_json(pipeline::evaluate(run, sample));
}

json Service::sweep(const json& body) {
  auto cfg = body_config(body);
  auto corpus_id = require_string(body, "corpus_id");
  auto component = require_string(body, "component_id");
  auto param = body.value("param", std::string("threshold"));
  auto sample_id = body.value("sample_id", std::string("sample"));
  check_id(sample_id, "sample_id");
  std::vector<double> grid = pipeline::default_grid();
  if (body.contains("grid")) {
    if (!body["grid"].is_array()) throw HttpError(400, "invalid_request", "grid must be a list of numbers");
    grid.clear();
    for (const auto& v : body["grid"]) {
      if (!v.is_number()) throw HttpError(400, "invalid_request", "grid must be a list of numbers");
      grid.push_back(v.get<double>());
    }
  }
  auto c = corpus(corpus_id, cfg.exclude_reposts);
  auto sample_path = c->root / (sample_id + ".csv");
  if (!std::filesystem::exists(sample_path)) throw HttpError(404, "not_found", "unknown sample '" + sample_id + "'");
  auto sample = load_sample(sample_path, c->post_ids());
  if (!cfg.find(component)) throw HttpError(404, "not_found", "no component named '" + component + "' in config");
  pipeline::Engine engine(c);
  try {
    return pipeline::to_json(pipeline::sweep(engine, cfg, sample, component, param, grid));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::validation) throw HttpError(422, "invalid_config", e.what());
    throw;
  }
}

json Service::optimize(const json& body) {
  auto cfg = body_config(body);
  std::optional<pipeline::RunRecord> profile;
  if (body.contains("run_id")) {
    auto run_id = require_string(body, "run_id");
    check_id(run_id, "run_id");
    auto entry = registry_.get(run_id);
    if (!entry) throw HttpError(404, "not_found", "unknown run '" + run_id + "'");
    if (entry->status != RunStatus::done) throw HttpError(409, "conflict", "run " + run_id + " is not done");
    profile = pipeline::load_run(registry_.dir(run_id));
  } else if (body.contains("corpus_id")) {
    pipeline::Engine engine(corpus(require_string(body, "corpus_id"), cfg.exclude_reposts));
    profile = engine.run(cfg);
  }
  try {
    return pipeline::to_json(pipeline::optimize_order(cfg, profile ? &*profile : nullptr));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::validation) throw HttpError(422, "invalid_config", e.what());
    throw;
  }
}

json Service::submit_run(const json& body) {
  auto cfg = body_config(body);
  auto corpus_id = require_string(body, "corpus_id");
  corpus_dir(corpus_id);
  std::optional<std::string> sample_id;
  if (body.contains("sample_id")) {
    sample_id = require_string(body, "sample_id");
    check_id(*sample_id, "sample_id");
  }
  auto id = registry_.create(corpus_id, sample_id, pipeline::to_json(cfg));
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(id);
  }
  queue_cv_.notify_one();
  return {{"run_id", id}, {"status", "pending"}};
}

void Service::worker_loop() {
  for (;;) {
    std::string id;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      id = queue_.front();
      queue_.pop_front();
      ++active_;
    }
    execute_run(id);
    {
      std::lock_guard lock(queue_mutex_);
      --active_;
    }
    idle_cv_.notify_all();
  }
}

void Service::execute_run(const std::string& run_id) {
  try {
    registry_.mark_running(run_id);
    auto entry = *registry_.get(run_id);
    auto cfg = pipeline::parse_config_json(entry.config);
    auto c = corpus(entry.corpus_id, cfg.exclude_reposts);
    pipeline::Engine engine(c);
    auto run = engine.run(cfg);
    run.run_id = run_id;
    std::optional<pipeline::EvalMetrics> metrics;
    auto sample_path = c->root / (entry.sample_id.value_or("sample") + ".csv");
    if (std::filesystem::exists(sample_path)) {
      metrics = pipeline::evaluate(run, load_sample(sample_path, c->post_ids()));
    } else if (entry.sample_id) {
      throw Error(ErrorCode::not_found, "unknown sample '" + *entry.sample_id + "'");
    }
    pipeline::save_run(registry_.dir(run_id), run, metrics);
    registry_.mark_done(run_id, pipeline::run_summary(run, metrics));
    spdlog::info("run {} done: {} of {} items kept", run_id, run.kept_count(), run.total());
  } catch (const std::exception& e) {
    spdlog::error("run {} failed: {}", run_id, e.what());
    try {
      registry_.mark_failed(run_id, e.what());
    } catch (const std::exception&) {
    }
  }
}

void Service::wait_for_runs() {
  std::unique_lock lock(queue_mutex_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && active_ == 0; });
}

json Service::run_status(const std::string& run_id) const {
  check_id(run_id, "run_id");
  auto e = registry_.get(run_id);
  if (!e) throw HttpError(404, "not_found", "unknown run '" + run_id + "'");
  return to_json(*e);
}

json Service::list_runs() const {
  json out = json::array();
  for (const auto& e : registry_.list()) {
    out.push_back({{"run_id", e.run_id}, {"status", to_string(e.status)}, {"corpus_id", e.corpus_id},
                   {"created_at", e.created_at}});
  }
  return {{"runs", out}};
}

json Service::trigger_series(const Query& query) {
  auto corpus_id = default_corpus_id(query);
  auto c = corpus(corpus_id, true);
  auto width = parse_bucket_width(query_or(query, "bucket", "hour"));
  std::vector<std::string> terms;
  std::stringstream ss(require_query(query, "term"));
  for (std::string t; std::getline(ss, t, ',');) {
    if (!t.empty()) terms.push_back(t);
  }
  if (terms.empty()) throw HttpError(400, "invalid_request", "term is empty");
  auto tokenized = trigger::tokenize_posts(c->posts);
  auto [from, to] = trigger::covering_span(tokenized, width);
  if (query.count("from")) from = floor_to(query_time(query.at("from"), "from"), width);
  if (query.count("to")) to = ceil_to(query_time(query.at("to"), "to"), width);
  if (to < from) throw HttpError(400, "invalid_request", "'to' precedes 'from'");
  auto series = trigger::bucket_term_counts(tokenized, terms, width, from, to);
  json out = json::array();
  for (const auto& s : series) {
    json rows = json::array();
    for (std::size_t i = 0; i < s.counts.size(); ++i) {
      rows.push_back({{"bucket", format_timestamp(s.bucket_start(i))}, {"count", s.counts[i]}});
    }
    out.push_back({{"term", s.term}, {"origin", format_timestamp(s.origin)}, {"counts", s.counts}, {"rows", rows}});
  }
  return {{"corpus_id", corpus_id}, {"bucket_width_s", width.count()}, {"from", format_timestamp(from)},
          {"to", format_timestamp(to)}, {"series", out}};
}

json Service::trigger_events(const Query& query) {
  auto corpus_id = default_corpus_id(query);
  auto path = corpus_dir(corpus_id) / "events.csv";
  json out = json::array();
  if (std::filesystem::exists(path)) {
    for (const auto& e : load_events(path)) out.push_back(event_json(e));
  }
  return {{"corpus_id", corpus_id}, {"events", out}};
}

json Service::trigger_evaluate(const json& body) {
  auto dict_id = require_string(body, "dictionary_id");
  check_id(dict_id, "dictionary_id");
  auto dict_path = options_.data_root / "dictionaries" / (dict_id + ".json");
  if (!std::filesystem::exists(dict_path)) throw HttpError(404, "not_found", "unknown dictionary '" + dict_id + "'");
  auto dictionary = trigger::load_dictionary(dict_path);
  Query q;
  if (body.contains("corpus_id")) q["corpus_id"] = require_string(body, "corpus_id");
  auto corpus_id = default_corpus_id(q);
  auto c = corpus(corpus_id, true);
  auto events_path = c->root / "events.csv";
  if (!std::filesystem::exists(events_path)) throw HttpError(404, "not_found", "corpus '" + corpus_id + "' has no events.csv");
  auto events = load_events(events_path);
  trigger::LoeoOptions opts;
  opts.window = body.value("W", 24);
  opts.threshold = body.value("threshold", 0.5);
  opts.negative_ratio = body.value("negative_ratio", 1.0);
  auto result = trigger::to_json(trigger::evaluate_loeo(c->posts, events, dictionary, opts));
  result["dictionary_id"] = dict_id;
  result["corpus_id"] = corpus_id;
  return result;
}

json Service::aggregate(const Query& query) {
  auto run_id = require_query(query, "run_id");
  check_id(run_id, "run_id");
  auto entry = registry_.get(run_id);
  if (!entry) throw HttpError(404, "not_found", "unknown run '" + run_id + "'");
  if (entry->status != RunStatus::done) throw HttpError(409, "conflict", "run " + run_id + " is not done");
  auto width = parse_bucket_width(query_or(query, "bucket", "day"));
  auto run = pipeline::load_run(registry_.dir(run_id));
  auto dir = corpus_dir(entry->corpus_id);
  std::filesystem::path regions_path = dir / "regions.csv";
  for (const auto& comp : run.config.components) {
    if (comp.component_id == "geometry") {
      std::filesystem::path p(*comp.string("regions"));
      regions_path = p.is_absolute() ? p : dir / p;
    }
  }
  if (!std::filesystem::exists(regions_path)) throw HttpError(404, "not_found", "no regions file for run " + run_id);
  auto regions = load_regions(regions_path);
  auto resolutions = pipeline::kept_resolutions(run);
  auto result = aggregate::aggregate(resolutions, regions, width);
  std::optional<std::map<std::string, double>> impact;
  if (std::filesystem::exists(dir / "impact.csv")) impact = synth::load_impact(dir / "impact.csv");
  auto fc = aggregate::export_choropleth(result, regions, impact);
  fc["metadata"]["run_id"] = run_id;
  if (impact) {
    std::map<std::string, double> counts;
    for (const auto& r : regions) counts[r.region_id] = static_cast<double>(result.totals.at(r.region_id));
    try {
      fc["metadata"]["spearman"] = aggregate::to_json(aggregate::spearman(counts, *impact));
    } catch (const Error&) {
      fc["metadata"]["spearman"] = nullptr;
    }
  }
  return fc;
}

json Service::suggestions(const Query& query) {
  auto run_id = require_query(query, "run_id");
  check_id(run_id, "run_id");
  auto entry = registry_.get(run_id);
  if (!entry) throw HttpError(404, "not_found", "unknown run '" + run_id + "'");
  if (entry->status != RunStatus::done) throw HttpError(409, "conflict", "run " + run_id + " is not done");

  std::vector<pipeline::RunRecord> runs;
  std::vector<std::string> ids;
  for (const auto& e : registry_.list()) {
    if (e.corpus_id != entry->corpus_id || e.status != RunStatus::done || e.run_id > run_id) continue;
    runs.push_back(pipeline::load_run(registry_.dir(e.run_id)));
    ids.push_back(e.run_id);
  }
  std::vector<pipeline::HistoryEntry> history;
  for (std::size_t i = 0; i < runs.size(); ++i) history.push_back({ids[i], &runs[i], std::nullopt, {}});

  const auto& latest = runs.back();
  auto c = corpus(entry->corpus_id, latest.config.exclude_reposts);
  auto sample_path = c->root / (entry->sample_id.value_or("sample") + ".csv");
  if (std::filesystem::exists(sample_path)) {
    auto sample = load_sample(sample_path, c->post_ids());
    history.back().metrics = pipeline::evaluate(latest, sample);
    pipeline::Engine engine(c);
    for (const auto& comp : latest.config.components) {
      if (comp.params.contains("threshold")) {
        auto grid = pipeline::default_grid();
        history.back().sweeps.push_back(pipeline::sweep(engine, latest.config, sample, comp.name, "threshold", grid));
      }
    }
  }
  json out = json::array();
  for (const auto& s : pipeline::suggest(history)) out.push_back(pipeline::to_json(s));
  return {{"run_id", run_id}, {"suggestions", out}};
}

void Service::install_routes() {
  auto& srv = *http_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  auto reply = [](httplib::Response& res, const std::function<json()>& fn, int ok_status = 200) {
    try {
      res.status = ok_status;
      res.set_content(fn().dump(), "application/json");
    } catch (const std::exception& e) {
      auto [status, body] = error_response(e);
      res.status = status;
      res.set_content(body.dump(), "application/json");
    }
  };
  auto body_of = [](const httplib::Request& req) {
    try {
      return json::parse(req.body);
    } catch (const json::exception&) {
      throw HttpError(400, "invalid_request", "request body is not valid JSON");
    }
  };
  auto query_of = [](const httplib::Request& req) {
    Query q;
    for (const auto& [k, v] : req.params) q.emplace(k, v);
    return q;
  };

  srv.Get("/api/components", [=, this](const httplib::Request&, httplib::Response& res) {
    reply(res, [&] { return components(); });
  });
  srv.Post("/api/pipeline/evaluate", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return evaluate(body_of(req)); });
  });
  srv.Post("/api/pipeline/sweep", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return sweep(body_of(req)); });
  });
  srv.Post("/api/pipeline/optimize", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return optimize(body_of(req)); });
  });
  srv.Post("/api/pipeline/run", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return submit_run(body_of(req)); }, 202);
  });
  srv.Get("/api/runs", [=, this](const httplib::Request&, httplib::Response& res) {
    reply(res, [&] { return list_runs(); });
  });
  srv.Get(R"(/api/runs/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return run_status(req.matches[1]); });
  });
  srv.Get("/api/trigger/series", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return trigger_series(query_of(req)); });
  });
  srv.Get("/api/trigger/events", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return trigger_events(query_of(req)); });
  });
  srv.Post("/api/trigger/evaluate", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return trigger_evaluate(body_of(req)); });
  });
  srv.Get("/api/aggregate", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return aggregate(query_of(req)); });
  });
  srv.Get("/api/suggestions", [=, this](const httplib::Request& req, httplib::Response& res) {
    reply(res, [&] { return suggestions(query_of(req)); });
  });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      res.set_content(json{{"error", {{"code", "not_found"}, {"message", "no such endpoint"}}}}.dump(),
                      "application/json");
    }
  });
  auto ui = options_.data_root / "ui";
  if (std::filesystem::is_directory(ui)) srv.set_mount_point("/", ui.string());
}

int Service::bind(const std::string& host, int port) {
  http_ = std::make_unique<httplib::Server>();
  install_routes();
  if (port == 0) {
    int p = http_->bind_to_any_port(host);
    if (p < 0) throw Error(ErrorCode::io, "cannot bind " + host);
    return p;
  }
  if (!http_->bind_to_port(host, port)) throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Service::listen() {
  if (!http_) throw Error(ErrorCode::contract, "listen() before bind()");
  http_->listen_after_bind();
}

void Service::stop() {
  if (http_) http_->stop();
}

}  // namespace geopulse::service
