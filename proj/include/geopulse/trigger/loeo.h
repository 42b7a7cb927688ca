#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/trigger/dictionary.h"
#include "geopulse/trigger/model.h"

namespace geopulse::trigger {

struct Confusion {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  // 1.0 when the denominator is empty.
  double precision() const;
  double recall() const;
  Confusion& operator+=(const Confusion& o);
};

Confusion micro_average(std::span<const Confusion> folds);

struct LoeoOptions {
  int window = 24;
  double threshold = 0.5;
  double negative_ratio = 1.0;  // matched negatives per test positive
  TrainOptions train;
};

struct LoeoFold {
  std::string event_id;
  std::size_t train_windows = 0;
  std::size_t overlap_windows = 0;
  std::size_t matched_negatives = 0;
  Confusion confusion;
};

struct LoeoResult {
  std::vector<LoeoFold> folds;
  Confusion micro;
  LoeoOptions options;
  std::vector<std::string> terms;

  double precision() const { return micro.precision(); }
  double recall() const { return micro.recall(); }
};

// Fold per event. Test = windows overlapping the held-out event plus the
// nearest-in-time negatives outside it; train = every other window.
LoeoResult evaluate_loeo(std::span<const FeatureWindow> windows, std::span<const EventRecord> events,
                         const LoeoOptions& opts = {});
LoeoResult evaluate_loeo(std::span<const Post> posts, std::span<const EventRecord> events,
                         const Dictionary& dictionary, const LoeoOptions& opts = {});

nlohmann::json to_json(const LoeoResult& r);

}  // namespace geopulse::trigger
