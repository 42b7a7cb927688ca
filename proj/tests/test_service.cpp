#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "geopulse/core/corpus.h"
#include "geopulse/core/error.h"
#include "geopulse/core/sample.h"
#include "geopulse/pipeline/config.h"
#include "geopulse/pipeline/engine.h"
#include "geopulse/pipeline/metrics.h"
#include "geopulse/pipeline/optimizer.h"
#include "geopulse/pipeline/sweep.h"
#include "geopulse/service/run_registry.h"
#include "geopulse/service/server.h"
#include "geopulse/synth/generator.h"
#include "geopulse/trigger/dictionary.h"
#include "support.h"

using namespace geopulse;
using namespace geopulse::service;
using nlohmann::json;

namespace {

// Wall-clock fields differ between any two runs.
json without_timings(json j) {
  if (j.is_object()) {
    j.erase("mean_cost_ms");
    j.erase("expected_cost_per_item_ms");
    j.erase("elapsed_ms");
    for (auto& [k, v] : j.items()) v = without_timings(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = without_timings(v);
  }
  return j;
}

int status_of(const std::function<void()>& fn, std::string* code = nullptr) {
  try {
    fn();
  } catch (const std::exception& e) {
    auto [status, body] = error_response(e);
    if (code) *code = body["error"]["code"].get<std::string>();
    return status;
  }
  return 200;
}

}  // namespace

TEST(RunRegistry, UniqueIdsAndImmutableTerminalStates) {
  testkit::TempDir dir;
  RunRegistry reg(dir.path());
  auto a = reg.create("c", std::nullopt, json::object());
  auto b = reg.create("c", std::nullopt, json::object());
  EXPECT_NE(a, b);
  reg.mark_running(a);
  reg.mark_done(a, {{"kept", 3}});
  EXPECT_THROW(reg.mark_failed(a, "late"), Error);
  EXPECT_THROW(reg.mark_running(a), Error);
  EXPECT_EQ(reg.get(a)->status, RunStatus::done);
  EXPECT_EQ(reg.get(a)->summary["kept"], 3);
  EXPECT_FALSE(reg.get("run-999999"));
  EXPECT_EQ(reg.list().size(), 2u);
}

TEST(RunRegistry, RestartMarksUnfinishedFailed) {
  testkit::TempDir dir;
  std::string done, running;
  {
    RunRegistry reg(dir.path());
    done = reg.create("c", std::nullopt, json::object());
    reg.mark_running(done);
    reg.mark_done(done, json::object());
    running = reg.create("c", "s", json::object());
    reg.mark_running(running);
  }
  RunRegistry reg(dir.path());
  EXPECT_EQ(reg.get(done)->status, RunStatus::done);
  EXPECT_EQ(reg.get(running)->status, RunStatus::failed);
  EXPECT_EQ(reg.get(running)->sample_id, "s");
  auto next = reg.create("c", std::nullopt, json::object());
  EXPECT_NE(next, done);
  EXPECT_NE(next, running);
}

TEST(ErrorResponse, StatusMapping) {
  EXPECT_EQ(error_response(Error(ErrorCode::not_found, "x")).first, 404);
  EXPECT_EQ(error_response(Error(ErrorCode::validation, "x")).first, 422);
  EXPECT_EQ(error_response(Error(ErrorCode::invalid_argument, "x")).first, 400);
  auto [s, body] = error_response(Error(ErrorCode::engine, "boom"));
  EXPECT_EQ(s, 500);
  EXPECT_EQ(body["error"]["code"], "engine_error");
  EXPECT_EQ(body["error"]["message"], "boom");
  EXPECT_EQ(error_response(HttpError(409, "conflict", "x")).second["error"]["code"], "conflict");
}

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new testkit::TempDir();
    auto spec = testkit::small_spec();
    spec.regions = {Region{"NE", "north east", parse_wkt_polygon("POLYGON((11 45, 13 45, 13 46, 11 46, 11 45))"), 100000},
                    Region{"W", "west", parse_wkt_polygon("POLYGON((0 40, 11 40, 11 50, 0 50, 0 40))"), 400000}};
    auto g = synth::generate(spec);
    synth::write_corpus(g, root_->path() / "corpora" / "small");
    std::filesystem::create_directories(root_->path() / "dictionaries");
    trigger::Dictionary d{"en", {"flood", "rain"}, {}, {}};
    trigger::save_dictionary(root_->path() / "dictionaries" / "basic.json", d);
    cfg_ = new json(json::parse(testkit::read_file(testkit::data_file("case_study_pipeline.json"))));
  }
  static void TearDownTestSuite() {
    delete root_;
    delete cfg_;
  }
  void SetUp() override { svc_ = std::make_unique<Service>(ServiceOptions{root_->path(), 2, "*"}); }
  void TearDown() override {
    svc_->wait_for_runs();
    svc_.reset();
  }

  std::shared_ptr<const Corpus> corpus() const {
    return std::make_shared<const Corpus>(load_corpus(root_->path() / "corpora" / "small"));
  }
  LabeledSample sample(const Corpus& c) const { return load_sample(c.root / "sample.csv", c.post_ids()); }

  std::string finished_run(const json& config) {
    auto r = svc_->submit_run({{"config", config}, {"corpus_id", "small"}});
    svc_->wait_for_runs();
    return r["run_id"].get<std::string>();
  }

  static testkit::TempDir* root_;
  static json* cfg_;
  std::unique_ptr<Service> svc_;
};

testkit::TempDir* ServiceTest::root_ = nullptr;
json* ServiceTest::cfg_ = nullptr;

TEST_F(ServiceTest, ComponentsListsBuiltinScorers) {
  auto j = svc_->components();
  auto scorers = j["builtin_scorers"].get<std::vector<std::string>>();
  for (const char* id : {"dhash-dedup", "photo-entropy", "nsfw-stub", "geolocate"}) {
    EXPECT_NE(std::find(scorers.begin(), scorers.end(), id), scorers.end()) << id;
  }
  EXPECT_EQ(j["components"].size(), pipeline::component_registry().size());
}

TEST_F(ServiceTest, EvaluateEqualsLibraryCall) {
  auto api = svc_->evaluate({{"config", *cfg_}, {"corpus_id", "small"}});
  auto c = corpus();
  auto run = pipeline::Engine(c).run(pipeline::parse_config_json(*cfg_));
  auto lib = pipeline::to_json(pipeline::evaluate(run, sample(*c)));
  EXPECT_EQ(without_timings(api), without_timings(lib));
  EXPECT_EQ(without_timings(api).dump(), without_timings(lib).dump());
}

TEST_F(ServiceTest, SweepEqualsLibraryCall) {
  auto api = svc_->sweep({{"config", *cfg_}, {"corpus_id", "small"}, {"component_id", "photo"}});
  auto c = corpus();
  pipeline::Engine e(c);
  auto grid = pipeline::default_grid();
  auto lib = pipeline::to_json(pipeline::sweep(e, pipeline::parse_config_json(*cfg_), sample(*c), "photo", "threshold", grid));
  EXPECT_EQ(api["rows"].size(), 21u);
  EXPECT_EQ(without_timings(api), without_timings(lib));
}

TEST_F(ServiceTest, OptimizeDeclaredEqualsLibraryCall) {
  auto api = svc_->optimize({{"config", *cfg_}});
  auto lib = pipeline::to_json(pipeline::optimize_order(pipeline::parse_config_json(*cfg_)));
  EXPECT_EQ(api, lib);
}

TEST_F(ServiceTest, ErrorsMapToStatusCodes) {
  std::string code;
  EXPECT_EQ(status_of([&] { svc_->run_status("unknown"); }, &code), 404);
  EXPECT_EQ(code, "not_found");
  EXPECT_EQ(status_of([&] { svc_->evaluate({{"config", *cfg_}, {"corpus_id", "nope"}}); }, &code), 404);
  auto bad = *cfg_;
  bad["components"][1]["params"]["threshold"] = 1.2;
  EXPECT_EQ(status_of([&] { svc_->evaluate({{"config", bad}, {"corpus_id", "small"}}); }, &code), 422);
  EXPECT_EQ(code, "invalid_config");
  EXPECT_EQ(status_of([&] { svc_->evaluate({{"config", *cfg_}}); }, &code), 400);
  EXPECT_EQ(status_of([&] { svc_->evaluate({{"config", *cfg_}, {"corpus_id", "../etc"}}); }, &code), 400);
  EXPECT_EQ(status_of([&] { svc_->aggregate({{"run_id", "run-424242"}}); }, &code), 404);
  auto no_cost = *cfg_;
  no_cost.erase("cost_model");
  EXPECT_EQ(status_of([&] { svc_->optimize({{"config", no_cost}}); }, &code), 422);
}

TEST_F(ServiceTest, AsyncRunLifecycle) {
  auto r = svc_->submit_run({{"config", *cfg_}, {"corpus_id", "small"}});
  EXPECT_EQ(r["status"], "pending");
  auto id = r["run_id"].get<std::string>();
  svc_->wait_for_runs();
  auto st = svc_->run_status(id);
  EXPECT_EQ(st["status"], "done");
  EXPECT_TRUE(st["summary"].is_object());
  EXPECT_TRUE(std::filesystem::exists(svc_->registry().dir(id) / "run.jsonl"));
  auto list = svc_->list_runs();
  EXPECT_FALSE(list["runs"].empty());

  auto other = svc_->submit_run({{"config", *cfg_}, {"corpus_id", "small"}});
  EXPECT_NE(other["run_id"], r["run_id"]);
}

TEST_F(ServiceTest, FailedRunRecordsDiagnostic) {
  json cfg = {{"components", {{{"component_id", "external"},
                               {"params", {{"scorer_id", "x"}, {"endpoint", "http://127.0.0.1:1/s"}, {"timeout_ms", 100}}}}}}};
  auto id = finished_run(cfg);
  auto st = svc_->run_status(id);
  EXPECT_EQ(st["status"], "failed");
  EXPECT_NE(st["error"].get<std::string>().find("failure budget"), std::string::npos);
}

TEST_F(ServiceTest, OptimizeFromProfiledRun) {
  auto id = finished_run(*cfg_);
  auto api = svc_->optimize({{"config", *cfg_}, {"run_id", id}});
  for (const auto& c : api["costs"]) EXPECT_EQ(c["source"], "measured");
  EXPECT_LE(api["ratio"].get<double>(), 1.0 + 1e-12);
}

TEST_F(ServiceTest, AggregateAndSuggestions) {
  json geo_cfg = json::parse(testkit::read_file(testkit::data_file("case_study_geo_pipeline.json")));
  auto id = finished_run(geo_cfg);
  ASSERT_EQ(svc_->run_status(id)["status"], "done");
  auto fc = svc_->aggregate({{"run_id", id}, {"bucket", "day"}});
  EXPECT_EQ(fc["type"], "FeatureCollection");
  EXPECT_EQ(fc["features"].size(), 2u);
  std::int64_t total = fc["metadata"]["unassigned"].get<std::int64_t>();
  for (const auto& f : fc["features"]) total += f["properties"]["count"].get<std::int64_t>();
  EXPECT_EQ(total, fc["metadata"]["resolutions"].get<std::int64_t>());
  EXPECT_TRUE(fc["metadata"].contains("spearman"));

  auto s = svc_->suggestions({{"run_id", id}});
  EXPECT_EQ(s["run_id"], id);
  EXPECT_TRUE(s["suggestions"].is_array());
}

TEST_F(ServiceTest, TriggerEndpoints) {
  auto series = svc_->trigger_series({{"term", "flood,rain"}, {"bucket", "hour"}});
  ASSERT_EQ(series["series"].size(), 2u);
  EXPECT_EQ(series["series"][0]["term"], "flood");
  auto events = svc_->trigger_events({});
  ASSERT_EQ(events["events"].size(), 1u);
  EXPECT_EQ(events["events"][0]["event_id"], "E1");
  std::string code;
  EXPECT_EQ(status_of([&] { svc_->trigger_series({}); }, &code), 400);
  // A single event cannot be left out.
  EXPECT_EQ(status_of([&] { svc_->trigger_evaluate({{"dictionary_id", "basic"}, {"W", 6}}); }, &code), 400);
  EXPECT_EQ(status_of([&] { svc_->trigger_evaluate({{"dictionary_id", "missing"}}); }, &code), 404);
}

TEST_F(ServiceTest, HttpFrontEnd) {
  int port = svc_->bind("127.0.0.1", 0);
  std::thread t([&] { svc_->listen(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(60, 0);

  auto r = cli.Get("/api/components");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(json::parse(r->body), svc_->components());

  r = cli.Get("/api/runs/unknown");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(json::parse(r->body)["error"]["code"], "not_found");

  json body = {{"config", *cfg_}, {"corpus_id", "small"}};
  r = cli.Post("/api/pipeline/evaluate", body.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(without_timings(json::parse(r->body)), without_timings(svc_->evaluate(body)));

  r = cli.Post("/api/pipeline/evaluate", "{oops", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);

  json bad = body;
  bad["config"]["components"][0]["component_id"] = "teleport";
  r = cli.Post("/api/pipeline/evaluate", bad.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(json::parse(r->body)["error"]["code"], "invalid_config");

  r = cli.Post("/api/pipeline/run", body.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 202);
  auto id = json::parse(r->body)["run_id"].get<std::string>();
  svc_->wait_for_runs();
  r = cli.Get("/api/runs/" + id);
  ASSERT_TRUE(r);
  EXPECT_EQ(json::parse(r->body)["status"], "done");

  r = cli.Get("/api/trigger/series?term=flood&bucket=day");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);

  r = cli.Options("/api/pipeline/evaluate");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 204);

  r = cli.Get("/api/no-such-endpoint");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);

  svc_->stop();
  t.join();
}
