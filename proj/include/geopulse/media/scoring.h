#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "geopulse/media/image.h"

namespace geopulse::media {

// Shannon entropy of the 256-bin histogram in bits, divided by 8.
double photo_score(const LuminanceImage& img);

inline constexpr const char* kPhotoEntropy = "photo-entropy";
inline constexpr const char* kNsfwStub = "nsfw-stub";
inline constexpr const char* kDhashDedup = "dhash-dedup";

enum class ScorerKind { builtin, external };

struct RejectItem {
  friend bool operator==(const RejectItem&, const RejectItem&) = default;
};
using FailurePolicy = std::variant<double, RejectItem>;

struct ScorerBinding {
  std::string scorer_id;
  ScorerKind kind = ScorerKind::builtin;
  std::optional<std::string> endpoint;
  int timeout_ms = 2000;
  FailurePolicy on_failure = 0.0;

  // Throws Error(validation): external needs an endpoint, policy score in
  // [0,1], builtin ids must be known per-item scorers.
  void validate() const;
};

struct ScoringItem {
  std::string item_id;
  std::string text;
  std::vector<LuminanceImage> images;
  // Encoded PGM for each image (sent to external scorers verbatim).
  std::vector<std::string> encoded;
};

enum class ScoreStatus {
  ok,
  failed_default,   // transport failure, policy score applied
  failed_reject,    // transport failure, policy says reject the item
  protocol_error,   // scorer answered but out of contract; item flagged
};

struct ScoreOutcome {
  std::string scorer_id;
  ScoreStatus status = ScoreStatus::ok;
  std::optional<double> score;
  std::string message;

  bool failed() const { return status != ScoreStatus::ok; }
};

// Builtin scorers are evaluated in-process. External scorers receive
// POST {item_id, media: base64 PGM or null, text} and must answer
// {score: number in [0,1]}; one request per image, the item score is the max.
ScoreOutcome score_with(const ScorerBinding& binding, const ScoringItem& item);

enum class Direction { keep_if_ge, keep_if_le };

std::optional<Direction> parse_direction(const std::string& s);
std::string to_string(Direction d);

inline bool passes(double score, double threshold, Direction direction) {
  return direction == Direction::keep_if_ge ? score >= threshold : score <= threshold;
}

std::vector<bool> threshold_filter(std::span<const double> scores, double threshold,
                                   Direction direction);

std::string base64_encode(std::string_view bytes);

}  // namespace geopulse::media
