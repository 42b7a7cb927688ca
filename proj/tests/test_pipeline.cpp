#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "geopulse/core/corpus.h"
#include "geopulse/core/error.h"
#include "geopulse/core/gazetteer.h"
#include "geopulse/core/sample.h"
#include "geopulse/geo/disambiguate.h"
#include "geopulse/geo/filters.h"
#include "geopulse/media/dedup.h"
#include "geopulse/media/dhash.h"
#include "geopulse/media/image.h"
#include "geopulse/media/scoring.h"
#include "geopulse/pipeline/config.h"
#include "geopulse/pipeline/engine.h"
#include "geopulse/pipeline/metrics.h"
#include "geopulse/pipeline/optimizer.h"
#include "geopulse/pipeline/run_io.h"
#include "geopulse/pipeline/suggest.h"
#include "geopulse/pipeline/sweep.h"
#include "geopulse/synth/generator.h"
#include "support.h"

using namespace geopulse;
using namespace geopulse::pipeline;
using nlohmann::json;

namespace {

std::string error_message(const std::function<void()>& fn, ErrorCode expected) {
  try {
    fn();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), expected) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no Error thrown";
  return "";
}

double brute_force_cost(const std::vector<CostEntry>& items) {
  std::vector<std::size_t> perm(items.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double total = 0, pass = 1;
    for (auto i : perm) {
      total += items[i].cost_ms * pass;
      pass *= items[i].selectivity;
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

PipelineConfig two_filter_fixture() {
  return parse_config(R"({
    "components": [
      {"name": "F1", "component_id": "photo"},
      {"name": "F2", "component_id": "nsfw"}
    ],
    "cost_model": {"F1": {"cost_ms": 5, "selectivity": 0.8}, "F2": {"cost_ms": 1, "selectivity": 0.2}}
  })");
}

}  // namespace

TEST(Config, CaseStudyParses) {
  auto c = load_config(testkit::data_file("case_study_pipeline.json"));
  ASSERT_EQ(c.components.size(), 4u);
  std::vector<std::string> ids;
  for (const auto& s : c.components) ids.push_back(s.component_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"dedup", "photo", "nsfw", "geolocate"}));
  EXPECT_TRUE(c.components[0].pinned);
  EXPECT_DOUBLE_EQ(c.components[1].number("threshold"), 0.5);
  EXPECT_EQ(c.components[2].string("direction"), "keep-if-le");
  EXPECT_TRUE(c.components[3].flag("drop_unresolved"));
}

TEST(Config, SerializeParseIsIdentity) {
  for (const char* f : {"case_study_pipeline.json", "case_study_geo_pipeline.json"}) {
    auto c = load_config(testkit::data_file(f));
    auto text = serialize(c);
    auto again = parse_config(text);
    EXPECT_EQ(again, c) << f;
    EXPECT_EQ(serialize(again), text) << f;
  }
}

TEST(Config, RangeErrors) {
  auto msg = error_message([] {
    parse_config(R"({"components":[{"component_id":"photo","params":{"threshold":1.2}}]})");
  }, ErrorCode::validation);
  EXPECT_NE(msg.find("threshold"), std::string::npos);
  error_message([] { parse_config(R"({"components":[{"component_id":"dedup","params":{"max_distance":65}}]})"); },
                ErrorCode::validation);
}

TEST(Config, UnknownThingsRejected) {
  auto msg = error_message([] { parse_config(R"({"components":[{"component_id":"teleport"}]})"); },
                           ErrorCode::validation);
  EXPECT_NE(msg.find("teleport"), std::string::npos);
  msg = error_message([] { parse_config(R"({"components":[],"colour":"red"})"); }, ErrorCode::validation);
  EXPECT_NE(msg.find("colour"), std::string::npos);
  msg = error_message([] { parse_config(R"({"components":[{"component_id":"photo","params":{"thresh":0.1}}]})"); },
                      ErrorCode::validation);
  EXPECT_NE(msg.find("thresh"), std::string::npos);
  error_message([] { parse_config("{not json"); }, ErrorCode::validation);
}

TEST(Config, PrecedenceCycleNamed) {
  auto msg = error_message([] {
    parse_config(R"({"components":[
      {"name":"A","component_id":"photo","precedence":["B"]},
      {"name":"B","component_id":"nsfw","precedence":["A"]}]})");
  }, ErrorCode::validation);
  EXPECT_NE(msg.find("precedence cycle: "), std::string::npos) << msg;
  EXPECT_NE(msg.find("A -> B -> A"), std::string::npos) << msg;
}

TEST(Config, OrderViolationAndImpliedGeoPrecedence) {
  auto msg = error_message([] {
    parse_config(R"({"components":[
      {"name":"A","component_id":"photo","precedence":["B"]},
      {"name":"B","component_id":"nsfw"}]})");
  }, ErrorCode::validation);
  EXPECT_NE(msg.find("must run after"), std::string::npos) << msg;
  msg = error_message([] {
    parse_config(R"({"components":[{"component_id":"density"},{"component_id":"geolocate"}]})");
  }, ErrorCode::validation);
  EXPECT_FALSE(msg.empty());
  auto c = load_config(testkit::data_file("case_study_geo_pipeline.json"));
  auto pairs = c.precedence_pairs();
  EXPECT_NE(std::find(pairs.begin(), pairs.end(), std::pair<std::size_t, std::size_t>{0, 2}), pairs.end());
}

TEST(Config, DuplicateNamesAndExternalRequirements) {
  error_message([] { parse_config(R"({"components":[{"component_id":"photo"},{"component_id":"photo"}]})"); },
                ErrorCode::validation);
  EXPECT_NO_THROW(parse_config(R"({"components":[{"component_id":"photo"},{"name":"photo2","component_id":"photo"}]})"));
  error_message([] { parse_config(R"({"components":[{"component_id":"external","params":{"scorer_id":"x"}}]})"); },
                ErrorCode::validation);
}

TEST(Config, WithParamAndReordered) {
  auto c = load_config(testkit::data_file("case_study_pipeline.json"));
  auto d = with_param(c, "photo", "threshold", 0.7);
  EXPECT_DOUBLE_EQ(d.find("photo")->number("threshold"), 0.7);
  EXPECT_DOUBLE_EQ(c.find("photo")->number("threshold"), 0.5);
  EXPECT_THROW(with_param(c, "photo", "threshold", 2.0), Error);
  std::vector<std::string> order{"dedup", "nsfw", "photo", "geolocate"};
  auto r = reordered(c, order);
  EXPECT_EQ(r.components[1].name, "nsfw");
  std::vector<std::string> bad{"dedup", "nsfw"};
  EXPECT_THROW(reordered(c, bad), Error);
}

TEST(Registry, DescriptorsAndJson) {
  for (const char* id : {"dedup", "photo", "nsfw", "external", "geolocate", "geometry", "density"}) {
    ASSERT_NE(find_component(id), nullptr) << id;
  }
  EXPECT_TRUE(find_component("dedup")->pinned_by_default);
  EXPECT_TRUE(find_component("geometry")->requires_geolocation);
  auto j = to_json(*find_component("photo"));
  EXPECT_EQ(j["implementation"], "photo-entropy");
  EXPECT_FALSE(j["params"].empty());
}

TEST(Metrics, TenItemFixture) {
  RunRecord run;
  LabeledSample sample;
  // relevant: i0..i3; kept: i0,i1,i2 (relevant) and i4,i5 (not).
  for (int i = 0; i < 10; ++i) {
    ItemFate f;
    f.post_id = "i" + std::to_string(i);
    bool keep = i <= 2 || i == 4 || i == 5;
    if (!keep) f.removed_by = "photo";
    run.items.push_back(f);
    sample.labels[f.post_id] = i < 4;
  }
  auto m = evaluate(run, sample);
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.fp, 2u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_EQ(m.tn, 4u);
  EXPECT_DOUBLE_EQ(m.precision, 0.6);
  EXPECT_DOUBLE_EQ(m.recall, 0.75);
  EXPECT_DOUBLE_EQ(m.reduction_rate, 0.5);
  EXPECT_FALSE(m.precision_undefined);
}

TEST(Metrics, KeepAllKeepNoneAndUnlabeled) {
  RunRecord run;
  LabeledSample sample;
  for (int i = 0; i < 6; ++i) {
    ItemFate f;
    f.post_id = "i" + std::to_string(i);
    run.items.push_back(f);
    if (i < 4) sample.labels[f.post_id] = i % 2 == 0;
  }
  auto all = evaluate(run, sample);
  EXPECT_DOUBLE_EQ(all.recall, 1.0);
  EXPECT_DOUBLE_EQ(all.reduction_rate, 0.0);
  EXPECT_DOUBLE_EQ(all.precision, 0.5);
  EXPECT_EQ(all.labeled, 4u);

  // Relabeling unlabeled items does not move precision or recall.
  auto relabeled = run;
  relabeled.items[4].post_id = "zz";
  EXPECT_TRUE(same_quality(all, evaluate(relabeled, sample)));

  for (auto& f : run.items) f.removed_by = "photo";
  auto none = evaluate(run, sample);
  EXPECT_DOUBLE_EQ(none.precision, 1.0);
  EXPECT_TRUE(none.precision_undefined);
  EXPECT_DOUBLE_EQ(none.recall, 0.0);
  EXPECT_DOUBLE_EQ(none.reduction_rate, 1.0);
  EXPECT_TRUE(to_json(none)["kept_zero"].get<bool>());
}

TEST(Optimizer, ExpectedCostFormula) {
  std::vector<CostEntry> one{{"A", 3, 0.5}};
  EXPECT_DOUBLE_EQ(expected_cost(one), 3.0);
  std::vector<CostEntry> ab{{"A", 1, 0.5}, {"B", 2, 1.0}};
  EXPECT_DOUBLE_EQ(expected_cost(ab), 2.0);
  std::vector<CostEntry> ba{{"B", 2, 0.1}, {"A", 1, 1.0}};
  EXPECT_DOUBLE_EQ(expected_cost(ba), 2.1);
}

TEST(Optimizer, TwoComponentExample) {
  OrderProblem p{{{"A", 1, 0.5}, {"B", 2, 0.1}}, {}, {false, false}};
  auto s = solve_order(p);
  EXPECT_EQ(s.order, (std::vector<std::size_t>{0, 1}));
  EXPECT_DOUBLE_EQ(s.cost, 2.0);
  p.before = {{1, 0}};
  s = solve_order(p);
  EXPECT_EQ(s.order, (std::vector<std::size_t>{1, 0}));
  EXPECT_DOUBLE_EQ(s.cost, 2.1);
}

TEST(Optimizer, ExhaustiveAndRankMatchBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> cost(0.1, 10), sel(0, 0.99);
  for (int inst = 0; inst < 300; ++inst) {
    OrderProblem p;
    std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) p.items.push_back({"c" + std::to_string(i), cost(rng), sel(rng)});
    p.pinned.assign(n, false);
    double want = brute_force_cost(p.items);
    auto ex = solve_order(p, 8);
    EXPECT_EQ(ex.method, "exhaustive");
    EXPECT_NEAR(ex.cost, want, 1e-9);
    auto rank = solve_order(p, 0);
    EXPECT_EQ(rank.method, "rank");
    EXPECT_NEAR(rank.cost, want, 1e-9);
    EXPECT_LE(ex.cost, expected_cost(p.items) + 1e-12);
  }
}

TEST(Optimizer, RespectsPinsAndPrecedenceAgainstBruteForce) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> cost(0.1, 10), sel(0, 0.99);
  for (int inst = 0; inst < 100; ++inst) {
    OrderProblem p;
    std::size_t n = 2 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) p.items.push_back({"c" + std::to_string(i), cost(rng), sel(rng)});
    p.pinned.assign(n, false);
    p.pinned[rng() % n] = rng() % 2;
    std::size_t a = rng() % n, b = rng() % n;
    if (a < b) p.before.push_back({a, b});
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i)
        if (p.pinned[i] && perm[i] != i) ok = false;
      for (auto [x, y] : p.before) {
        auto px = std::find(perm.begin(), perm.end(), x) - perm.begin();
        auto py = std::find(perm.begin(), perm.end(), y) - perm.begin();
        if (px > py) ok = false;
      }
      if (!ok) continue;
      std::vector<CostEntry> ordered;
      for (auto i : perm) ordered.push_back(p.items[i]);
      best = std::min(best, expected_cost(ordered));
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto s = solve_order(p);
    EXPECT_NEAR(s.cost, best, 1e-9) << "instance " << inst;
    for (std::size_t i = 0; i < n; ++i)
      if (p.pinned[i]) EXPECT_EQ(s.order[i], i);
  }
}

TEST(Optimizer, TwoFilterCostRatio) {
  auto r = optimize_order(two_filter_fixture());
  EXPECT_EQ(r.optimized_order, (std::vector<std::string>{"F2", "F1"}));
  EXPECT_DOUBLE_EQ(r.original_cost, 5.8);
  EXPECT_DOUBLE_EQ(r.optimized_cost, 2.0);
  EXPECT_NEAR(r.ratio, 2.0 / 5.8, 1e-12);
  EXPECT_EQ(r.config.components[0].name, "F2");
  EXPECT_EQ(r.cost_sources, (std::vector<std::string>{"declared", "declared"}));
}

TEST(Optimizer, MissingCostsExplain) {
  auto c = parse_config(R"({"components":[{"component_id":"photo"}]})");
  auto msg = error_message([&] { optimize_order(c); }, ErrorCode::validation);
  EXPECT_NE(msg.find("run the pipeline first"), std::string::npos);
}

TEST(Suggest, ReorderAndRemoval) {
  auto cfg = two_filter_fixture();
  RunRecord run;
  run.config = cfg;
  run.components = {{"F1", "photo", 100, 80, 20, 0, 0, 0.8, 500, 5.0, {}},
                    {"F2", "nsfw", 80, 80, 0, 0, 0, 1.0, 80, 1.0, {}}};
  std::vector<HistoryEntry> h{{"run-1", &run, std::nullopt, {}}};
  // F2 passes everything: removal, and moving it first would cost more.
  auto s = suggest(h);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].kind, "remove");
  EXPECT_EQ(s[0].component, "F2");
  EXPECT_EQ(s[0].evidence, std::vector<std::string>{"run-1"});

  run.components[1].selectivity = 0.2;
  run.components[1].passed = 16;
  s = suggest(h);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].kind, "reorder");
  EXPECT_NEAR(s[0].impact["ratio"].get<double>(), 2.0 / 5.8, 1e-12);
}

TEST(Suggest, ThresholdOnlyWhenDominating) {
  auto cfg = two_filter_fixture();
  RunRecord run;
  run.config = cfg;
  EvalMetrics cur;
  cur.precision = 0.5;
  cur.recall = 0.8;
  cur.reduction_rate = 0.3;
  SweepResult sw{"F1", "threshold", 0.5, {}};
  EvalMetrics worse = cur;
  worse.recall = 0.7;
  worse.reduction_rate = 0.6;
  sw.points.push_back({0.6, worse});
  std::vector<HistoryEntry> h{{"r", &run, cur, {sw}}};
  for (const auto& s : suggest(h)) EXPECT_NE(s.kind, "threshold");
  EvalMetrics better = cur;
  better.reduction_rate = 0.4;
  h[0].sweeps[0].points.push_back({0.55, better});
  bool found = false;
  for (const auto& s : suggest(h)) {
    if (s.kind != "threshold") continue;
    found = true;
    EXPECT_DOUBLE_EQ(s.change["to"].get<double>(), 0.55);
  }
  EXPECT_TRUE(found);
}

class EngineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testkit::TempDir();
    auto spec = testkit::small_spec();
    spec.repost_fraction = 0.1;
    gen_ = new synth::GeneratedCorpus(synth::generate(spec));
    synth::write_corpus(*gen_, dir_->path());
    // One corrupt image to exercise the undecodable path.
    for (const auto& p : gen_->posts) {
      if (!p.media.empty()) {
        testkit::write_file(dir_->path() / "media" / p.media[0].path, "garbage");
        corrupt_ = p.id;
        break;
      }
    }
    corpus_ = std::make_shared<const Corpus>(load_corpus(dir_->path()));
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete gen_;
    corpus_.reset();
  }
  LabeledSample sample() const { return load_sample(dir_->path() / "sample.csv", corpus_->post_ids()); }

  static testkit::TempDir* dir_;
  static synth::GeneratedCorpus* gen_;
  static std::shared_ptr<const Corpus> corpus_;
  static std::string corrupt_;
};

testkit::TempDir* EngineTest::dir_ = nullptr;
synth::GeneratedCorpus* EngineTest::gen_ = nullptr;
std::shared_ptr<const Corpus> EngineTest::corpus_;
std::string EngineTest::corrupt_;

TEST_F(EngineTest, EmptyPipelineKeepsEverything) {
  Engine e(corpus_);
  auto run = e.run(parse_config(R"({"components":[]})"));
  EXPECT_EQ(run.kept_count(), corpus_->posts.size());
  EXPECT_DOUBLE_EQ(evaluate(run, sample()).reduction_rate, 0.0);
}

TEST_F(EngineTest, CaseStudyMatchesComposedModuleOracle) {
  auto cfg = load_config(testkit::data_file("case_study_pipeline.json"));
  Engine e(corpus_);
  auto run = e.run(cfg);

  const auto& posts = corpus_->posts;
  std::vector<media::DedupItem> items;
  std::map<std::string, std::vector<media::LuminanceImage>> images;
  std::set<std::string> undecodable;
  for (const auto& p : posts) {
    media::DedupItem it{p.id, p.created_at, {}, false};
    for (const auto& m : p.media) {
      try {
        auto img = media::load_pgm(corpus_->media_path(m));
        it.hashes.push_back(media::dhash(img));
        images[p.id].push_back(img);
      } catch (const Error&) {
        it.undecodable = true;
      }
    }
    if (it.undecodable) undecodable.insert(p.id);
    items.push_back(it);
  }
  auto d = media::dedup(items, 10);
  std::set<std::string> alive(d.kept.begin(), d.kept.end());
  auto gaz = load_gazetteer(dir_->path() / "gazetteer.csv");
  std::vector<std::string> expected;
  for (const auto& p : posts) {
    if (!alive.count(p.id)) continue;
    if (!undecodable.count(p.id)) {
      double score = 0;
      for (const auto& img : images[p.id]) score = std::max(score, media::photo_score(img));
      if (score < 0.5) continue;
    }
    if (!geo::geocode(p, gaz)) continue;
    expected.push_back(p.id);
  }
  EXPECT_EQ(run.kept_ids(), expected);
  EXPECT_GT(expected.size(), 0u);
  EXPECT_LT(expected.size(), posts.size());

  const auto& fate = *std::find_if(run.items.begin(), run.items.end(), [](auto& f) { return f.post_id == corrupt_; });
  EXPECT_NE(std::find(fate.flags.begin(), fate.flags.end(), "undecodable-media"), fate.flags.end());
}

TEST_F(EngineTest, RemovalLogsPartitionRemovedItems) {
  auto cfg = load_config(testkit::data_file("case_study_pipeline.json"));
  Engine e(corpus_);
  auto run = e.run(cfg);
  std::size_t removed = 0;
  std::map<std::string, std::size_t> by_component;
  for (const auto& f : run.items) {
    if (f.removed_by) {
      ++removed;
      ++by_component[*f.removed_by];
      EXPECT_NE(cfg.find(*f.removed_by), nullptr);
      EXPECT_FALSE(f.detail.is_null());
    }
  }
  EXPECT_EQ(removed + run.kept_count(), run.total());
  std::size_t input = run.total();
  for (const auto& st : run.components) {
    EXPECT_EQ(st.removed, by_component[st.name]) << st.name;
    EXPECT_EQ(st.input, input);
    EXPECT_EQ(st.passed + st.removed, st.input);
    EXPECT_DOUBLE_EQ(st.selectivity, st.input ? static_cast<double>(st.passed) / st.input : 1.0);
    input = st.passed;
  }
  EXPECT_EQ(input, run.kept_count());
}

TEST_F(EngineTest, Deterministic) {
  auto cfg = load_config(testkit::data_file("case_study_pipeline.json"));
  auto a = Engine(corpus_).run(cfg);
  auto b = Engine(corpus_).run(cfg);
  EXPECT_EQ(a.kept_ids(), b.kept_ids());
  ASSERT_EQ(a.components.size(), b.components.size());
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    EXPECT_EQ(a.components[i].selectivity, b.components[i].selectivity);
  }
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    EXPECT_EQ(to_json(a.items[i]), to_json(b.items[i]));
  }
}

TEST_F(EngineTest, SweepsAreMonotoneAndConsistent) {
  auto cfg = load_config(testkit::data_file("case_study_pipeline.json"));
  auto s = sample();
  Engine e(corpus_);
  auto grid = default_grid();
  ASSERT_EQ(grid.size(), 21u);
  auto photo = sweep(e, cfg, s, "photo", "threshold", grid);
  ASSERT_EQ(photo.points.size(), 21u);
  for (std::size_t i = 1; i < photo.points.size(); ++i) {
    EXPECT_LE(photo.points[i].metrics.kept, photo.points[i - 1].metrics.kept);
  }
  auto nsfw = sweep(e, cfg, s, "nsfw", "threshold", grid);
  for (std::size_t i = 1; i < nsfw.points.size(); ++i) {
    EXPECT_GE(nsfw.points[i].metrics.kept, nsfw.points[i - 1].metrics.kept);
  }
  auto direct = evaluate(Engine(corpus_).run(cfg), s);
  EXPECT_TRUE(same_quality(photo.points[10].metrics, direct));
  EXPECT_DOUBLE_EQ(photo.current_value, 0.5);
  auto j = to_json(photo);
  EXPECT_EQ(j["rows"].size(), 21u);
}

TEST_F(EngineTest, RepostsExcludedByDefault) {
  auto with = load_corpus(dir_->path(), ParseOptions{false});
  EXPECT_GT(with.posts.size(), corpus_->posts.size());
  EXPECT_EQ(corpus_->excluded_reposts, with.posts.size() - corpus_->posts.size());
}

TEST_F(EngineTest, GeoChainDropsUnresolvedAndSparse) {
  auto cfg = parse_config(R"({"components":[{"component_id":"geolocate"},{"component_id":"density","params":{"eps_km":30,"min_pts":3}}]})");
  auto run = Engine(corpus_).run(cfg);
  std::vector<GeoPoint> pts;
  for (const auto& f : run.items) {
    if (f.kept()) {
      ASSERT_TRUE(f.resolution);
      pts.push_back(f.resolution->primary_point());
    }
  }
  EXPECT_EQ(geo::density_filter(pts, 30, 3).size(), pts.size());
}

TEST_F(EngineTest, FailureBudgetAbortsRun) {
  auto cfg = parse_config(R"({"failure_budget":0.1,"components":[{"component_id":"external",
    "params":{"scorer_id":"remote","endpoint":"http://127.0.0.1:1/score","timeout_ms":200}}]})");
  auto msg = error_message([&] { Engine(corpus_).run(cfg); }, ErrorCode::engine);
  EXPECT_NE(msg.find("failure budget"), std::string::npos);
}

TEST_F(EngineTest, RunIoRoundTrip) {
  auto cfg = load_config(testkit::data_file("case_study_pipeline.json"));
  auto run = Engine(corpus_).run(cfg);
  run.run_id = "r1";
  testkit::TempDir out;
  save_run(out.path(), run, evaluate(run, sample()));
  auto back = load_run(out.path());
  EXPECT_EQ(back.run_id, "r1");
  EXPECT_EQ(back.config, run.config);
  EXPECT_EQ(back.kept_ids(), run.kept_ids());
  ASSERT_EQ(back.components.size(), run.components.size());
  EXPECT_EQ(back.components[3].passed, run.components[3].passed);
  auto res = load_resolutions(out / "resolutions.jsonl");
  EXPECT_EQ(res, kept_resolutions(run));
  auto summary = json::parse(testkit::read_file(out / "summary.json"));
  EXPECT_TRUE(summary.contains("metrics"));
}
