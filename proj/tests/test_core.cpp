#include <gtest/gtest.h>

#include <sstream>

#include "geopulse/core/corpus.h"
#include "geopulse/core/csv.h"
#include "geopulse/core/error.h"
#include "geopulse/core/events.h"
#include "geopulse/core/gazetteer.h"
#include "geopulse/core/polygon.h"
#include "geopulse/core/post.h"
#include "geopulse/core/region.h"
#include "geopulse/core/sample.h"
#include "geopulse/core/text.h"
#include "geopulse/core/time.h"
#include "support.h"

using namespace geopulse;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::contract;
}

}  // namespace

TEST(Csv, QuotedFieldsAndLineNumbers) {
  std::istringstream in("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n\n\"multi\nline\",z\nlast,row\n");
  auto rows = csv::read(in);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].fields[0], "x,1");
  EXPECT_EQ(rows[1].fields[1], "say \"hi\"");
  EXPECT_EQ(rows[2].fields[0], "multi\nline");
  EXPECT_EQ(rows[2].line, 4u);
  EXPECT_EQ(rows[3].line, 6u);
}

TEST(Csv, HeaderMismatchIsParseError) {
  std::istringstream in("id,name\n1,x\n");
  EXPECT_EQ(code_of([&] { csv::read_with_header(in, {"id", "label"}, "test"); }), ErrorCode::parse);
}

TEST(Csv, WriteRoundTrip) {
  std::ostringstream out;
  csv::write_row(out, {"plain", "with,comma", "with \"quote\"", "two\nlines"});
  std::istringstream in(out.str());
  auto rows = csv::read(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].fields, (std::vector<std::string>{"plain", "with,comma", "with \"quote\"", "two\nlines"}));
}

TEST(Time, ParsesOffsetsAndFormatsUtc) {
  EXPECT_EQ(format_timestamp(parse_timestamp("2024-06-01")), "2024-06-01T00:00:00Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("2024-06-01T10:30")), "2024-06-01T10:30:00Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("2024-06-01T10:30:15.999Z")), "2024-06-01T10:30:15Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("2024-06-01T10:30:00+02:00")), "2024-06-01T08:30:00Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("2024-06-01T01:00:00-0130")), "2024-06-01T02:30:00Z");
  EXPECT_FALSE(try_parse_timestamp("2024-13-01"));
  EXPECT_FALSE(try_parse_timestamp("2024-02-30"));
  EXPECT_FALSE(try_parse_timestamp("yesterday"));
  EXPECT_THROW(parse_timestamp("nope"), Error);
}

TEST(Time, FloorAndCeil) {
  auto t = parse_timestamp("2024-06-01T10:30:00Z");
  EXPECT_EQ(format_timestamp(floor_to(t, Seconds{3600})), "2024-06-01T10:00:00Z");
  EXPECT_EQ(format_timestamp(ceil_to(t, Seconds{3600})), "2024-06-01T11:00:00Z");
  EXPECT_EQ(ceil_to(floor_to(t, Seconds{86400}), Seconds{86400}), floor_to(t, Seconds{86400}));
  auto before_epoch = parse_timestamp("1969-12-31T23:30:00Z");
  EXPECT_EQ(format_timestamp(floor_to(before_epoch, Seconds{3600})), "1969-12-31T23:00:00Z");
}

TEST(Text, FoldIsCompatibilityCaseless) {
  EXPECT_EQ(text::fold("PARIS"), "paris");
  EXPECT_EQ(text::fold("Straße"), "strasse");
  EXPECT_EQ(text::fold("ｆｌｏｏｄ"), "flood");
  EXPECT_EQ(text::fold("Ⅻ"), "xii");
}

TEST(Text, TokenizeDropsUrlsAndHandles) {
  auto toks = text::tokenize("@bob Flood in #Genova! see https://t.co/abc now");
  std::vector<std::string> words;
  for (const auto& t : toks) words.push_back(t.text);
  EXPECT_EQ(words, (std::vector<std::string>{"flood", "in", "genova", "see", "now"}));
}

TEST(Text, SpansAreCodePointOffsets) {
  std::string s = "città Ünïcode";
  auto toks = text::tokenize(s);
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[0].begin, 0u);
  EXPECT_EQ(toks[0].end, 5u);
  EXPECT_EQ(toks[1].begin, 6u);
  EXPECT_EQ(toks[1].end, 13u);
  EXPECT_EQ(text::code_point_count(s), 13u);
}

TEST(Text, NameKeyAndTokenSet) {
  EXPECT_EQ(text::name_key("Paris, TX"), text::name_key("PARIS tx"));
  EXPECT_EQ(text::name_key("Paris, TX"), "paris tx");
  EXPECT_EQ(text::token_set("b a b A"), (std::vector<std::string>{"a", "b"}));
}

TEST(Polygon, WktRoundTripAndErrors) {
  auto p = parse_wkt_polygon("POLYGON((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 2 1, 2 2, 1 1))");
  ASSERT_EQ(p.outer.size(), 5u);
  ASSERT_EQ(p.holes.size(), 1u);
  EXPECT_DOUBLE_EQ(p.outer[1].lon, 4.0);
  EXPECT_DOUBLE_EQ(p.outer[1].lat, 0.0);
  EXPECT_EQ(parse_wkt_polygon(to_wkt(p)), p);
  EXPECT_EQ(code_of([] { parse_wkt_polygon("POLYGON((0 0, 1 0, 1 1, 0 1))"); }), ErrorCode::validation);
  EXPECT_EQ(code_of([] { parse_wkt_polygon("CIRCLE(1)"); }), ErrorCode::parse);
}

TEST(Posts, ParseDiagnosticsAndReposts) {
  std::istringstream in(
      R"({"id":"a","created_at":"2024-01-01T00:00:00Z","lang":"en","text":"hi"})"
      "\n"
      R"({"id":"b","created_at":"2024-01-01T00:00:00Z","text":"rt","is_repost":true})"
      "\n"
      "not json\n"
      R"({"id":"a","created_at":"2024-01-01T00:00:00Z","text":"dup"})"
      "\n"
      R"({"id":"c","created_at":"bad","text":"x"})"
      "\n"
      R"({"id":"d","created_at":"2024-01-01T00:00:00Z","text":"x","media":[{"media_id":"m","path":"../etc"}]})"
      "\n");
  auto r = parse_posts(in);
  ASSERT_EQ(r.posts.size(), 1u);
  EXPECT_EQ(r.posts[0].id, "a");
  EXPECT_EQ(r.excluded_reposts, 1u);
  ASSERT_EQ(r.diagnostics.size(), 4u);
  EXPECT_EQ(r.diagnostics[0].line, 3u);
  EXPECT_EQ(r.diagnostics[1].line, 4u);
}

TEST(Posts, KeepsRepostsWhenAsked) {
  std::istringstream in(R"({"id":"b","created_at":"2024-01-01T00:00:00Z","text":"rt","is_repost":true})"
                        "\n");
  auto r = parse_posts(in, ParseOptions{false});
  ASSERT_EQ(r.posts.size(), 1u);
  EXPECT_TRUE(r.posts[0].is_repost);
}

TEST(Posts, JsonRoundTrip) {
  Post p;
  p.id = "x1";
  p.created_at = parse_timestamp("2024-01-02T03:04:05Z");
  p.lang = "fr";
  p.text = "inondation à Nice";
  p.media = {{"m1", "m1.pgm"}};
  p.native_geo = GeoPoint{43.7, 7.26};
  EXPECT_EQ(post_from_json(to_json(p)), p);
  std::ostringstream out;
  std::vector<Post> v{p};
  write_posts(out, v);
  std::istringstream in(out.str());
  auto back = parse_posts(in);
  ASSERT_EQ(back.posts.size(), 1u);
  EXPECT_EQ(back.posts[0], p);
}

TEST(Posts, PathContainment) {
  EXPECT_TRUE(is_contained_relative_path("a/b.pgm"));
  EXPECT_FALSE(is_contained_relative_path("../a.pgm"));
  EXPECT_FALSE(is_contained_relative_path("/etc/passwd"));
  EXPECT_FALSE(is_contained_relative_path("a/../../b"));
}

TEST(Gazetteer, LookupIsCaseAndCompatibilityInsensitive) {
  std::istringstream in(
      "entry_id,canonical_name,alt_names,lat,lon,admin_level,population,country,polygon_wkt\n"
      "1,Genova,Genoa|Gênes,44.41,8.93,8,580000,IT,\n"
      "2,Genova,,44.0,9.0,6,1000,IT,\n"
      "3,New York,NYC,40.7,-74.0,8,8000000,US,\n");
  auto g = load_gazetteer(in);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.lookup("GENOVA").size(), 2u);
  EXPECT_EQ(g.lookup("genoa").size(), 1u);
  EXPECT_EQ(g.lookup("gênes").size(), 1u);
  EXPECT_EQ(g.lookup("nyc")[0]->entry_id, "3");
  EXPECT_EQ(g.max_name_tokens(), 2u);
  ASSERT_NE(g.find_id("3"), nullptr);
  EXPECT_EQ(g.find_id("9"), nullptr);
}

TEST(Gazetteer, BadRowNamesLine) {
  std::istringstream in(
      "entry_id,canonical_name,alt_names,lat,lon,admin_level,population,country,polygon_wkt\n"
      "1,Genova,,44.41,8.93,8,580000,IT,\n"
      "2,Nowhere,,95.0,9.0,6,1000,IT,\n");
  try {
    load_gazetteer(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Gazetteer, WriteRoundTrip) {
  std::vector<GazetteerEntry> entries{{"a", "Alpha", {"Al"}, 1.5, 2.5, 4, 10, "FR", std::nullopt}};
  std::ostringstream out;
  write_gazetteer(out, entries);
  std::istringstream in(out.str());
  auto g = load_gazetteer(in);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.entries()[0], entries[0]);
}

TEST(Events, ActiveIsHalfOpen) {
  std::istringstream in(
      "event_id,event_type,country,start,end,name\n"
      "E1,flood,IT,2024-01-01T00:00:00Z,2024-01-02T00:00:00Z,x\n");
  auto ev = load_events(in);
  ASSERT_EQ(ev.size(), 1u);
  auto s = ev[0].start;
  auto e = ev[0].end;
  EXPECT_TRUE(ev[0].active_during(s, s + Seconds{1}));
  EXPECT_FALSE(ev[0].active_during(e, e + Seconds{3600}));
  EXPECT_FALSE(ev[0].active_during(s - Seconds{3600}, s));
}

TEST(Events, EndBeforeStartRejected) {
  std::istringstream in(
      "event_id,event_type,country,start,end,name\n"
      "E1,flood,IT,2024-01-02T00:00:00Z,2024-01-01T00:00:00Z,x\n");
  EXPECT_EQ(code_of([&] { load_events(in); }), ErrorCode::validation);
}

TEST(Sample, UnknownPostsListed) {
  std::istringstream in("post_id,relevant\na,1\nzz,0\n");
  try {
    load_sample(in, {"a", "b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
  }
}

TEST(Sample, RoundTrip) {
  LabeledSample s{"sample", {{"a", true}, {"b", false}}};
  std::ostringstream out;
  write_sample(out, s);
  std::istringstream in(out.str());
  auto back = load_sample(in, {"a", "b"});
  EXPECT_EQ(back.labels, s.labels);
}

TEST(Regions, CsvAndGeoJsonAgree) {
  std::istringstream csv_in(
      "region_id,name,population,polygon_wkt\n"
      "R1,One,1000,\"POLYGON((0 0, 1 0, 1 1, 0 1, 0 0))\"\n");
  auto a = load_regions_csv(csv_in);
  std::istringstream gj_in(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "properties":{"region_id":"R1","name":"One","population":1000},
      "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]})");
  auto b = load_regions_geojson(gj_in);
  EXPECT_EQ(a, b);
  std::ostringstream out;
  write_regions(out, a);
  std::istringstream again(out.str());
  EXPECT_EQ(load_regions_csv(again), a);
}

TEST(Corpus, LoadsAndOrdersChronologically) {
  testkit::TempDir dir;
  testkit::write_file(dir / "posts.jsonl",
                      R"({"id":"b","created_at":"2024-01-01T00:00:00Z","text":"x"})"
                      "\n"
                      R"({"id":"a","created_at":"2024-01-01T00:00:00Z","text":"y"})"
                      "\n"
                      R"({"id":"c","created_at":"2023-12-31T00:00:00Z","text":"z"})"
                      "\n");
  auto c = load_corpus(dir.path());
  ASSERT_EQ(c.posts.size(), 3u);
  auto order = chronological_order(c.posts);
  EXPECT_EQ(c.posts[order[0]].id, "c");
  EXPECT_EQ(c.posts[order[1]].id, "a");
  EXPECT_EQ(c.posts[order[2]].id, "b");
  ASSERT_NE(c.find("a"), nullptr);
  EXPECT_EQ(c.post_ids().size(), 3u);
}

TEST(Corpus, MissingPostsFileIsNotFound) {
  testkit::TempDir dir;
  EXPECT_EQ(code_of([&] { load_corpus(dir.path()); }), ErrorCode::not_found);
}
