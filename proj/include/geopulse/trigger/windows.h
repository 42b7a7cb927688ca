#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geopulse/core/events.h"
#include "geopulse/trigger/term_series.h"

namespace geopulse::trigger {

// W consecutive buckets ending at `end_bucket`, features log(1+count) laid
// out bucket-major: features[w * terms.size() + k].
struct FeatureWindow {
  std::vector<std::string> terms;
  int window = 24;
  std::size_t end_bucket = 0;
  Timestamp first_start{};  // start of the earliest bucket
  Timestamp last_start{};   // start of the final bucket
  Seconds bucket_width{3600};
  std::vector<double> features;
  bool label = false;
  std::optional<std::string> event_id;  // event active in the final bucket

  double at(int w, std::size_t k) const { return features[static_cast<std::size_t>(w) * terms.size() + k]; }
  Timestamp end_time() const { return last_start + bucket_width; }
};

std::vector<FeatureWindow> make_windows(std::span<const TermSeries> series,
                                        std::span<const EventRecord> events, int window = 24);

}  // namespace geopulse::trigger
