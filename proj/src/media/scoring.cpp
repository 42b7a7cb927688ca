#include "geopulse/media/scoring.h"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "geopulse/core/error.h"

namespace geopulse::media {

double photo_score(const LuminanceImage& img) {
  if (img.pixels.empty()) return 0.0;
  std::array<std::size_t, 256> hist{};
  for (auto p : img.pixels) ++hist[p];
  const double n = static_cast<double>(img.pixels.size());
  double entropy = 0.0;
  for (auto count : hist) {
    if (count == 0) continue;
    double p = static_cast<double>(count) / n;
    entropy -= p * std::log2(p);
  }
  return std::clamp(entropy / 8.0, 0.0, 1.0);
}

std::string base64_encode(std::string_view bytes) {
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<std::string_view::const_iterator, 6, 8>>;
  std::string out(It(bytes.begin()), It(bytes.end()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

void ScorerBinding::validate() const {
  if (scorer_id.empty()) throw Error(ErrorCode::validation, "scorer_id must not be empty");
  if (kind == ScorerKind::external) {
    if (!endpoint || endpoint->empty()) {
      throw Error(ErrorCode::validation, "external scorer '" + scorer_id + "' needs an endpoint");
    }
    if (endpoint->rfind("http://", 0) != 0) {
      throw Error(ErrorCode::validation, "external scorer endpoint must be an http:// URL");
    }
  } else if (scorer_id != kPhotoEntropy && scorer_id != kNsfwStub) {
    throw Error(ErrorCode::validation, "unknown builtin scorer '" + scorer_id + "'");
  }
  if (timeout_ms <= 0) throw Error(ErrorCode::validation, "timeout must be positive");
  if (auto* s = std::get_if<double>(&on_failure); s && !(*s >= 0.0 && *s <= 1.0)) {
    throw Error(ErrorCode::validation, "default_score_on_failure must be in [0,1]");
  }
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

ScoreOutcome transport_failure(const ScorerBinding& b, std::string message) {
  ScoreOutcome out;
  out.scorer_id = b.scorer_id;
  out.message = std::move(message);
  if (auto* s = std::get_if<double>(&b.on_failure)) {
    out.status = ScoreStatus::failed_default;
    out.score = *s;
  } else {
    out.status = ScoreStatus::failed_reject;
  }
  return out;
}

ScoreOutcome call_external(const ScorerBinding& b, const ScoringItem& item) {
  auto ep = split_endpoint(*b.endpoint);
  httplib::Client client(ep.origin);
  auto sec = b.timeout_ms / 1000;
  auto usec = (b.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);

  std::vector<const std::string*> payloads;
  for (const auto& e : item.encoded) payloads.push_back(&e);
  if (payloads.empty()) payloads.push_back(nullptr);

  double best = 0.0;
  for (const auto* media : payloads) {
    nlohmann::json body = {{"item_id", item.item_id}, {"text", item.text}};
    body["media"] = media ? nlohmann::json(base64_encode(*media)) : nlohmann::json(nullptr);
    auto res = client.Post(ep.path, body.dump(), "application/json");
    if (!res) {
      return transport_failure(b, "request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      return transport_failure(b, "scorer answered HTTP " + std::to_string(res->status));
    }
    ScoreOutcome bad;
    bad.scorer_id = b.scorer_id;
    bad.status = ScoreStatus::protocol_error;
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      bad.message = "scorer reply is not JSON";
      return bad;
    }
    if (!reply.is_object() || !reply.contains("score") || !reply["score"].is_number()) {
      bad.message = "scorer reply lacks numeric 'score'";
      return bad;
    }
    double s = reply["score"].get<double>();
    if (!(s >= 0.0 && s <= 1.0)) {
      bad.message = "scorer returned " + std::to_string(s) + " outside [0,1]";
      return bad;
    }
    best = std::max(best, s);
  }
  ScoreOutcome out;
  out.scorer_id = b.scorer_id;
  out.score = best;
  return out;
}

}  // namespace

ScoreOutcome score_with(const ScorerBinding& binding, const ScoringItem& item) {
  binding.validate();
  if (binding.kind == ScorerKind::builtin) {
    ScoreOutcome out;
    out.scorer_id = binding.scorer_id;
    if (binding.scorer_id == kNsfwStub) {
      out.score = 0.0;
    } else {
      double best = 0.0;
      for (const auto& img : item.images) best = std::max(best, photo_score(img));
      out.score = best;
    }
    return out;
  }
  auto out = call_external(binding, item);
  if (out.failed()) {
    spdlog::warn("scorer '{}' failed on item '{}': {}", binding.scorer_id, item.item_id,
                 out.message);
  }
  return out;
}

std::optional<Direction> parse_direction(const std::string& s) {
  if (s == "keep-if-ge" || s == "keep_if_ge" || s == ">=") return Direction::keep_if_ge;
  if (s == "keep-if-le" || s == "keep_if_le" || s == "<=") return Direction::keep_if_le;
  return std::nullopt;
}

std::string to_string(Direction d) {
  return d == Direction::keep_if_ge ? "keep-if-ge" : "keep-if-le";
}

std::vector<bool> threshold_filter(std::span<const double> scores, double threshold,
                                   Direction direction) {
  std::vector<bool> keep;
  keep.reserve(scores.size());
  for (double s : scores) keep.push_back(passes(s, threshold, direction));
  return keep;
}

}  // namespace geopulse::media
