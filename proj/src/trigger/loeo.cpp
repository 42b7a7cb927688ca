#include "geopulse/trigger/loeo.h"

#include <algorithm>

#include "geopulse/core/error.h"

namespace geopulse::trigger {

double Confusion::precision() const {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Confusion::recall() const {
  return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

Confusion micro_average(std::span<const Confusion> folds) {
  Confusion sum;
  for (const auto& c : folds) sum += c;
  return sum;
}

namespace {

Seconds distance_to(const FeatureWindow& w, const EventRecord& e) {
  if (w.last_start < e.start) return e.start - w.last_start;
  if (w.last_start >= e.end) return w.last_start - e.end;
  return Seconds{0};
}

}  // namespace

LoeoResult evaluate_loeo(std::span<const FeatureWindow> windows, std::span<const EventRecord> events,
                         const LoeoOptions& opts) {
  if (events.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "leave-one-event-out needs at least 2 events, got " +
                                                 std::to_string(events.size()));
  }
  if (windows.empty()) throw Error(ErrorCode::invalid_argument, "leave-one-event-out: no windows");
  LoeoResult result;
  result.options = opts;
  result.terms = windows.front().terms;

  for (const auto& e : events) {
    std::vector<char> in_test(windows.size(), 0);
    std::size_t positives = 0;
    LoeoFold fold;
    fold.event_id = e.event_id;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (e.active_during(windows[i].first_start, windows[i].end_time())) {
        in_test[i] = 1;
        ++fold.overlap_windows;
        positives += windows[i].label ? 1 : 0;
      }
    }
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (!in_test[i] && !windows[i].label) negatives.push_back(i);
    }
    std::stable_sort(negatives.begin(), negatives.end(), [&](std::size_t a, std::size_t b) {
      return distance_to(windows[a], e) < distance_to(windows[b], e);
    });
    auto wanted = static_cast<std::size_t>(opts.negative_ratio * static_cast<double>(positives) + 0.5);
    wanted = std::min(wanted, negatives.size());
    for (std::size_t i = 0; i < wanted; ++i) in_test[negatives[i]] = 1;
    fold.matched_negatives = wanted;

    std::vector<FeatureWindow> train_set;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (!in_test[i]) train_set.push_back(windows[i]);
    }
    fold.train_windows = train_set.size();
    TriggerModel model = train(train_set, opts.train);
    model.threshold = opts.threshold;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (!in_test[i]) continue;
      bool predicted = fires(model, windows[i]);
      bool actual = windows[i].label;
      if (predicted && actual) ++fold.confusion.tp;
      else if (predicted) ++fold.confusion.fp;
      else if (actual) ++fold.confusion.fn;
      else ++fold.confusion.tn;
    }
    result.micro += fold.confusion;
    result.folds.push_back(std::move(fold));
  }
  return result;
}

LoeoResult evaluate_loeo(std::span<const Post> posts, std::span<const EventRecord> events,
                         const Dictionary& dictionary, const LoeoOptions& opts) {
  auto tokenized = tokenize_posts(posts);
  auto [from, to] = covering_span(tokenized, dictionary.options.bucket_width);
  auto terms = dictionary.terms();
  auto series = bucket_term_counts(tokenized, terms, dictionary.options.bucket_width, from, to);
  auto windows = make_windows(series, events, opts.window);
  return evaluate_loeo(windows, events, opts);
}

nlohmann::json to_json(const LoeoResult& r) {
  auto conf = [](const Confusion& c) {
    return nlohmann::json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn},
                          {"precision", c.precision()}, {"recall", c.recall()}};
  };
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"event_id", f.event_id},
                     {"train_windows", f.train_windows},
                     {"overlap_windows", f.overlap_windows},
                     {"matched_negatives", f.matched_negatives},
                     {"confusion", conf(f.confusion)}});
  }
  return {{"folds", folds},
          {"micro", conf(r.micro)},
          {"precision", r.precision()},
          {"recall", r.recall()},
          {"window", r.options.window},
          {"threshold", r.options.threshold},
          {"negative_ratio", r.options.negative_ratio},
          {"negative_matching", "nearest-in-time"},
          {"terms", r.terms}};
}

}  // namespace geopulse::trigger
