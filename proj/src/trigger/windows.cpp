#include "geopulse/trigger/windows.h"

#include <cmath>

#include "geopulse/core/error.h"

namespace geopulse::trigger {

std::vector<FeatureWindow> make_windows(std::span<const TermSeries> series,
                                        std::span<const EventRecord> events, int window) {
  if (series.empty()) throw Error(ErrorCode::invalid_argument, "make_windows: no series");
  if (window < 1) throw Error(ErrorCode::invalid_argument, "make_windows: window must be >= 1");
  const auto& ref = series.front();
  for (const auto& s : series) {
    if (s.origin != ref.origin || s.bucket_width != ref.bucket_width || s.counts.size() != ref.counts.size()) {
      throw Error(ErrorCode::invalid_argument, "make_windows: series '" + s.term + "' is on a different bucket grid");
    }
  }
  const std::size_t n = ref.counts.size();
  const auto w = static_cast<std::size_t>(window);
  if (w > n) {
    throw Error(ErrorCode::invalid_argument, "make_windows: window " + std::to_string(window) +
                                                 " exceeds series length " + std::to_string(n));
  }
  std::vector<std::string> terms;
  for (const auto& s : series) terms.push_back(s.term);

  std::vector<FeatureWindow> out;
  out.reserve(n - w + 1);
  for (std::size_t t = w - 1; t < n; ++t) {
    FeatureWindow fw;
    fw.terms = terms;
    fw.window = window;
    fw.end_bucket = t;
    fw.bucket_width = ref.bucket_width;
    fw.first_start = ref.bucket_start(t + 1 - w);
    fw.last_start = ref.bucket_start(t);
    fw.features.resize(w * terms.size());
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t k = 0; k < terms.size(); ++k) {
        fw.features[i * terms.size() + k] = std::log1p(static_cast<double>(series[k].counts[t + 1 - w + i]));
      }
    }
    for (const auto& e : events) {
      if (e.active_during(fw.last_start, fw.end_time())) {
        fw.label = true;
        fw.event_id = e.event_id;
        break;
      }
    }
    out.push_back(std::move(fw));
  }
  return out;
}

}  // namespace geopulse::trigger
