#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geopulse/core/events.h"
#include "geopulse/core/gazetteer.h"
#include "geopulse/core/post.h"
#include "geopulse/core/region.h"
#include "geopulse/core/sample.h"
#include "geopulse/media/image.h"
#include "geopulse/synth/synth_spec.h"

namespace geopulse::synth {

enum class ImageKind { photo, nonphoto, near_duplicate };

struct ImageTruth {
  ImageKind kind = ImageKind::photo;
  std::string source_media_id;  // set for near duplicates
};

struct GeneratedCorpus {
  std::vector<Post> posts;  // chronological, ids p0000000...
  std::map<std::string, media::LuminanceImage> images;  // media_id -> pixels
  std::vector<EventRecord> events;
  LabeledSample sample;
  std::vector<GazetteerEntry> gazetteer;
  std::vector<Region> regions;
  std::map<std::string, double> impact;  // region_id -> injected intensity

  // Ground truth kept for tests and evaluation.
  std::vector<std::optional<std::string>> post_event;  // parallel to posts
  std::map<std::string, ImageTruth> image_truth;
};

GeneratedCorpus generate(const SynthSpec& spec);

// Writes posts.jsonl, media/, events.csv, sample.csv, gazetteer.csv and,
// when the spec has regions, regions.csv and impact.csv.
void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir);

void write_impact(std::ostream& out, const std::map<std::string, double>& impact);
std::map<std::string, double> load_impact(const std::filesystem::path& path);

}  // namespace geopulse::synth
