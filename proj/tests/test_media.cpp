#include <gtest/gtest.h>

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "geopulse/core/error.h"
#include "geopulse/media/dedup.h"
#include "geopulse/media/dhash.h"
#include "geopulse/media/image.h"
#include "geopulse/media/scoring.h"
#include "support.h"

using namespace geopulse;
using namespace geopulse::media;

namespace {

LuminanceImage random_image(std::mt19937_64& rng, int w, int h) {
  LuminanceImage img(w, h);
  std::uniform_int_distribution<int> px(0, 255);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(px(rng));
  return img;
}

// Area means in floating point, cells laid over [0,w)x[0,h) in pixel units.
std::uint64_t reference_dhash(const LuminanceImage& img) {
  const double cw = img.width / 9.0;
  const double ch = img.height / 8.0;
  double mean[8][9];
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 9; ++c) {
      double x0 = c * cw, x1 = (c + 1) * cw, y0 = r * ch, y1 = (r + 1) * ch;
      double sum = 0, area = 0;
      for (int y = 0; y < img.height; ++y) {
        double oy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        if (oy <= 0) continue;
        for (int x = 0; x < img.width; ++x) {
          double ox = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
          if (ox <= 0) continue;
          sum += ox * oy * img.at(x, y);
          area += ox * oy;
        }
      }
      mean[r][c] = sum / area;
    }
  }
  std::uint64_t bits = 0;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (mean[r][c] - mean[r][c + 1] > 1e-9) bits |= std::uint64_t{1} << (63 - (8 * r + c));
    }
  }
  return bits;
}

}  // namespace

TEST(Pgm, RoundTrip) {
  std::mt19937_64 rng(1);
  auto img = random_image(rng, 13, 7);
  EXPECT_EQ(decode_pgm(encode_pgm(img)), img);
}

TEST(Pgm, AcceptsCommentsAndSmallMaxval) {
  std::string bytes = "P5\n# comment\n2 1\n# another\n15\n";
  bytes.push_back(3);
  bytes.push_back(15);
  auto img = decode_pgm(bytes);
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.at(1, 0), 15);
}

TEST(Pgm, RejectsOtherFormats) {
  EXPECT_THROW(decode_pgm("P6\n1 1\n255\nabc"), Error);
  EXPECT_THROW(decode_pgm("P5\n2 2\n255\nab"), Error);
  EXPECT_THROW(decode_pgm("P5\n1 1\n65535\nab"), Error);
  EXPECT_THROW(decode_pgm("\x89PNG"), Error);
}

TEST(Dhash, MatchesFloatingPointReference) {
  std::mt19937_64 rng(42);
  const std::pair<int, int> sizes[] = {{9, 8}, {72, 64}, {37, 23}, {100, 51}, {5, 3}, {1, 1}, {200, 9}};
  for (auto [w, h] : sizes) {
    for (int k = 0; k < 20; ++k) {
      auto img = random_image(rng, w, h);
      EXPECT_EQ(dhash(img).bits, reference_dhash(img)) << w << "x" << h << " #" << k;
    }
  }
}

TEST(Dhash, GradientAndFlatImages) {
  LuminanceImage flat(30, 20, 128);
  EXPECT_EQ(dhash(flat).bits, 0u);
  LuminanceImage falling(9, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 9; ++x) falling.at(x, y) = static_cast<std::uint8_t>(250 - 20 * x);
  EXPECT_EQ(dhash(falling).bits, ~std::uint64_t{0});
  EXPECT_EQ(dhash(falling).hex(), "ffffffffffffffff");
  EXPECT_TRUE(dhash(falling).bit(7, 7));
}

TEST(Dhash, EmptyImageRejected) {
  EXPECT_THROW(dhash(LuminanceImage{}), Error);
}

TEST(Dhash, Hamming) {
  EXPECT_EQ(hamming({0}, {0xFF}), 8);
  EXPECT_EQ(hamming({~std::uint64_t{0}}, {0}), 64);
}

TEST(Dedup, MatchesSequentialAllPairsOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DedupItem> items;
    std::uniform_int_distribution<int> n_dist(1, 40);
    int n = n_dist(rng);
    std::vector<std::uint64_t> bases{rng(), rng(), rng()};
    for (int i = 0; i < n; ++i) {
      DedupItem it;
      it.id = "i" + std::to_string(i);
      it.created_at = Timestamp{Seconds{static_cast<long>(rng() % 20)}};
      int images = static_cast<int>(rng() % 3);
      for (int k = 0; k < images; ++k) {
        std::uint64_t h = bases[rng() % bases.size()];
        int flips = static_cast<int>(rng() % 16);
        for (int f = 0; f < flips; ++f) h ^= std::uint64_t{1} << (rng() % 64);
        it.hashes.push_back({h});
      }
      it.undecodable = rng() % 10 == 0;
      items.push_back(it);
    }
    const int maxd = 10;

    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      return std::tie(items[a].created_at, items[a].id) < std::tie(items[b].created_at, items[b].id);
    });
    std::vector<std::vector<int>> dist(items.size(), std::vector<int>(items.size(), 65));
    for (std::size_t a = 0; a < items.size(); ++a)
      for (std::size_t b = 0; b < items.size(); ++b)
        for (auto ha : items[a].hashes)
          for (auto hb : items[b].hashes)
            dist[a][b] = std::min(dist[a][b], static_cast<int>(std::bitset<64>(ha.bits ^ hb.bits).count()));
    std::vector<bool> kept(items.size(), false);
    std::vector<std::string> expected_kept;
    std::size_t expected_removed = 0;
    for (std::size_t idx : order) {
      bool dup = false;
      if (!items[idx].undecodable) {
        for (std::size_t j = 0; j < items.size(); ++j)
          if (kept[j] && dist[idx][j] <= maxd) dup = true;
      }
      if (dup) {
        ++expected_removed;
      } else {
        kept[idx] = true;
        expected_kept.push_back(items[idx].id);
      }
    }

    auto r = dedup(items, maxd);
    EXPECT_EQ(r.kept, expected_kept) << "trial " << trial;
    EXPECT_EQ(r.removals.size(), expected_removed);
    for (const auto& rem : r.removals) {
      auto find = [&](const std::string& id) {
        return static_cast<std::size_t>(std::find_if(items.begin(), items.end(),
                                                     [&](auto& x) { return x.id == id; }) - items.begin());
      };
      auto a = find(rem.removed_id), b = find(rem.matched_kept_id);
      EXPECT_TRUE(kept[b]);
      EXPECT_EQ(rem.distance, dist[a][b]);
      for (std::size_t j = 0; j < items.size(); ++j)
        if (kept[j] && std::tie(items[j].created_at, items[j].id) < std::tie(items[a].created_at, items[a].id))
          EXPECT_LE(rem.distance, dist[a][j]);
    }
  }
}

TEST(Dedup, OrderIndependentOfInput) {
  std::vector<DedupItem> items{{"b", Timestamp{Seconds{5}}, {{0x0F}}, false},
                               {"a", Timestamp{Seconds{5}}, {{0x0F}}, false},
                               {"c", Timestamp{Seconds{1}}, {{0xF0F0F0F0F0F0F0F0}}, false}};
  auto r = dedup(items);
  EXPECT_EQ(r.kept, (std::vector<std::string>{"c", "a"}));
  ASSERT_EQ(r.removals.size(), 1u);
  EXPECT_EQ(r.removals[0], (DedupRemoval{"b", "a", 0}));
}

TEST(Dedup, FlaggedItemsPass) {
  std::vector<DedupItem> items{{"a", Timestamp{}, {{1}}, false}, {"b", Timestamp{Seconds{1}}, {{1}}, true}};
  auto r = dedup(items);
  EXPECT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.flagged, std::vector<std::string>{"b"});
  EXPECT_THROW(dedup(items, 65), Error);
}

TEST(PhotoScore, EntropyExtremes) {
  LuminanceImage flat(16, 16, 9);
  EXPECT_DOUBLE_EQ(photo_score(flat), 0.0);
  LuminanceImage all(16, 16);
  for (int i = 0; i < 256; ++i) all.pixels[i] = static_cast<std::uint8_t>(i);
  EXPECT_NEAR(photo_score(all), 1.0, 1e-12);
  LuminanceImage half(2, 1);
  half.pixels = {0, 255};
  EXPECT_NEAR(photo_score(half), 1.0 / 8.0, 1e-12);
  LuminanceImage quarters(4, 1);
  quarters.pixels = {1, 2, 3, 4};
  EXPECT_NEAR(photo_score(quarters), 2.0 / 8.0, 1e-12);
}

TEST(Thresholds, Directions) {
  std::vector<double> s{0.2, 0.5, 0.8};
  EXPECT_EQ(threshold_filter(s, 0.5, Direction::keep_if_ge), (std::vector<bool>{false, true, true}));
  EXPECT_EQ(threshold_filter(s, 0.5, Direction::keep_if_le), (std::vector<bool>{true, true, false}));
  EXPECT_EQ(parse_direction("keep-if-le"), Direction::keep_if_le);
  EXPECT_FALSE(parse_direction("sideways"));
  EXPECT_EQ(to_string(Direction::keep_if_ge), "keep-if-ge");
}

TEST(Base64, KnownVectors) {
  EXPECT_EQ(base64_encode(""), "");
  EXPECT_EQ(base64_encode("f"), "Zg==");
  EXPECT_EQ(base64_encode("fo"), "Zm8=");
  EXPECT_EQ(base64_encode("foo"), "Zm9v");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
}

TEST(ScorerBinding, Validation) {
  ScorerBinding b{"x", ScorerKind::external, std::nullopt};
  EXPECT_THROW(b.validate(), Error);
  b.endpoint = "http://127.0.0.1:1/score";
  EXPECT_NO_THROW(b.validate());
  b.on_failure = 1.5;
  EXPECT_THROW(b.validate(), Error);
  ScorerBinding unknown{"no-such-scorer"};
  EXPECT_THROW(unknown.validate(), Error);
}

TEST(Scoring, BuiltinUsesMaxOverImages) {
  LuminanceImage flat(4, 4, 0), two(2, 1);
  two.pixels = {0, 255};
  ScoringItem item{"i", "", {flat, two}, {}};
  auto out = score_with({kPhotoEntropy}, item);
  ASSERT_TRUE(out.score);
  EXPECT_NEAR(*out.score, 1.0 / 8.0, 1e-12);
  EXPECT_EQ(*score_with({kNsfwStub}, item).score, 0.0);
}

class ExternalScorer : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body);
      ++requests_;
      if (mode_ == "error") {
        res.status = 500;
        return;
      }
      if (mode_ == "out-of-range") {
        res.set_content(R"({"score": 1.5})", "application/json");
        return;
      }
      if (mode_ == "garbage") {
        res.set_content("nope", "text/plain");
        return;
      }
      double score = body["media"].is_null() ? 0.1 : body["media"].get<std::string>().size() / 1000.0;
      res.set_content(nlohmann::json{{"score", std::min(1.0, score)}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  ScorerBinding binding() const {
    ScorerBinding b{"remote", ScorerKind::external, "http://127.0.0.1:" + std::to_string(port_) + "/score"};
    b.timeout_ms = 2000;
    return b;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::string mode_ = "ok";
  std::atomic<int> requests_{0};
};

TEST_F(ExternalScorer, OneRequestPerImageMaxScore) {
  ScoringItem item{"i", "t", {}, {std::string(100, 'a'), std::string(400, 'b')}};
  auto out = score_with(binding(), item);
  EXPECT_EQ(out.status, ScoreStatus::ok);
  EXPECT_EQ(requests_, 2);
  EXPECT_NEAR(*out.score, base64_encode(std::string(400, 'b')).size() / 1000.0, 1e-12);
}

TEST_F(ExternalScorer, TextOnlyItemSendsNullMedia) {
  auto out = score_with(binding(), ScoringItem{"i", "t", {}, {}});
  EXPECT_EQ(requests_, 1);
  EXPECT_DOUBLE_EQ(*out.score, 0.1);
}

TEST_F(ExternalScorer, FailurePolicies) {
  mode_ = "error";
  auto b = binding();
  b.on_failure = 0.25;
  auto out = score_with(b, ScoringItem{"i", "", {}, {}});
  EXPECT_EQ(out.status, ScoreStatus::failed_default);
  EXPECT_DOUBLE_EQ(*out.score, 0.25);
  b.on_failure = RejectItem{};
  EXPECT_EQ(score_with(b, ScoringItem{"i", "", {}, {}}).status, ScoreStatus::failed_reject);
}

TEST_F(ExternalScorer, ProtocolErrors) {
  mode_ = "out-of-range";
  EXPECT_EQ(score_with(binding(), ScoringItem{"i", "", {}, {}}).status, ScoreStatus::protocol_error);
  mode_ = "garbage";
  EXPECT_EQ(score_with(binding(), ScoringItem{"i", "", {}, {}}).status, ScoreStatus::protocol_error);
}

TEST(Scoring, UnreachableEndpointUsesPolicy) {
  ScorerBinding b{"remote", ScorerKind::external, "http://127.0.0.1:1/score"};
  b.timeout_ms = 300;
  b.on_failure = 0.0;
  auto out = score_with(b, ScoringItem{"i", "", {}, {}});
  EXPECT_EQ(out.status, ScoreStatus::failed_default);
  EXPECT_EQ(*out.score, 0.0);
}
