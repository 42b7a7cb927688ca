#include "geopulse/core/post.h"

#include <fstream>
#include <unordered_set>

#include "geopulse/core/error.h"

namespace geopulse {
namespace {

[[noreturn]] void reject(const std::string& reason) {
  throw Error(ErrorCode::validation, reason);
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) reject(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) reject(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

bool valid_language_code(const std::string& lang) {
  if (lang == "und") return true;
  return lang.size() == 2 && lang[0] >= 'a' && lang[0] <= 'z' &&
         lang[1] >= 'a' && lang[1] <= 'z';
}

bool is_contained_relative_path(const std::string& path) {
  if (path.empty()) return false;
  std::filesystem::path p(path);
  if (p.is_absolute() || p.has_root_name() || p.has_root_directory()) return false;
  for (const auto& part : p) {
    if (part == "..") return false;
  }
  return true;
}

Post post_from_json(const nlohmann::json& j) {
  if (!j.is_object()) reject("line is not a JSON object");
  static const std::unordered_set<std::string> known = {
      "id", "created_at", "lang", "text", "media", "native_geo", "is_repost"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) reject("unknown field '" + key + "'");
  }

  Post p;
  p.id = require_string(j, "id");
  if (p.id.empty()) reject("empty id");

  auto ts = try_parse_timestamp(require_string(j, "created_at"));
  if (!ts) reject("created_at is not an ISO-8601 timestamp");
  p.created_at = *ts;

  if (j.contains("lang")) {
    p.lang = require_string(j, "lang");
    if (!valid_language_code(p.lang)) {
      reject("lang must be a lowercase ISO 639-1 code or 'und'");
    }
  }
  p.text = j.contains("text") ? require_string(j, "text") : std::string();

  if (j.contains("media") && !j["media"].is_null()) {
    const auto& media = j["media"];
    if (!media.is_array()) reject("media must be an array");
    for (const auto& m : media) {
      if (!m.is_object()) reject("media entry must be an object");
      MediaRef ref;
      ref.media_id = require_string(m, "media_id");
      ref.path = require_string(m, "path");
      if (!is_contained_relative_path(ref.path)) {
        reject("media path '" + ref.path + "' escapes the media directory");
      }
      p.media.push_back(std::move(ref));
    }
  }

  if (j.contains("native_geo") && !j["native_geo"].is_null()) {
    const auto& g = j["native_geo"];
    if (!g.is_object()) reject("native_geo must be an object");
    const auto& lat = require(g, "lat");
    const auto& lon = require(g, "lon");
    if (!lat.is_number() || !lon.is_number()) reject("native_geo lat/lon must be numbers");
    double la = lat.get<double>();
    double lo = lon.get<double>();
    if (!(la >= -90.0 && la <= 90.0)) reject("latitude out of range");
    if (!(lo >= -180.0 && lo <= 180.0)) reject("longitude out of range");
    p.native_geo = GeoPoint{la, lo};
  }

  if (j.contains("is_repost")) {
    if (!j["is_repost"].is_boolean()) reject("is_repost must be a boolean");
    p.is_repost = j["is_repost"].get<bool>();
  }
  return p;
}

nlohmann::json to_json(const Post& post) {
  nlohmann::json j;
  j["id"] = post.id;
  j["created_at"] = format_timestamp(post.created_at);
  j["lang"] = post.lang;
  j["text"] = post.text;
  j["media"] = nlohmann::json::array();
  for (const auto& m : post.media) {
    j["media"].push_back({{"media_id", m.media_id}, {"path", m.path}});
  }
  if (post.native_geo) {
    j["native_geo"] = {{"lat", post.native_geo->lat}, {"lon", post.native_geo->lon}};
  } else {
    j["native_geo"] = nullptr;
  }
  j["is_repost"] = post.is_repost;
  return j;
}

ParseResult parse_posts(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Post p = post_from_json(j);
      if (!seen.insert(p.id).second) {
        result.diagnostics.push_back({line_no, "duplicate id '" + p.id + "'"});
        continue;
      }
      if (options.exclude_reposts && p.is_repost) {
        ++result.excluded_reposts;
        continue;
      }
      result.posts.push_back(std::move(p));
    } catch (const nlohmann::json::exception&) {
      result.diagnostics.push_back({line_no, "malformed JSON"});
    } catch (const Error& e) {
      result.diagnostics.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw Error(ErrorCode::io, "error reading post stream");
  return result;
}

ParseResult parse_posts_file(const std::filesystem::path& path,
                             const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return parse_posts(in, options);
}

void write_posts(std::ostream& out, std::span<const Post> posts) {
  for (const auto& p : posts) out << to_json(p).dump() << '\n';
}

}  // namespace geopulse
