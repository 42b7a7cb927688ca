#include "geopulse/synth/generator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_set>

#include "geopulse/core/csv.h"
#include "geopulse/core/error.h"
#include "geopulse/core/text.h"
#include "geopulse/geo/filters.h"
#include "geopulse/synth/lexicon.h"
#include "geopulse/synth/rng.h"

namespace geopulse::synth {
namespace {

constexpr double kKmPerDegree = 111.32;

GeoPoint offset_km(GeoPoint c, double dx_km, double dy_km) {
  double lat = std::clamp(c.lat + dy_km / kKmPerDegree, -89.9, 89.9);
  double cos_lat = std::max(0.01, std::cos(c.lat * std::numbers::pi / 180.0));
  double lon = c.lon + dx_km / (kKmPerDegree * cos_lat);
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return GeoPoint{lat, lon};
}

GeoPoint gaussian_around(Xorshift64Star& rng, GeoPoint c, double sigma_km) {
  double dx = rng.normal() * sigma_km;
  double dy = rng.normal() * sigma_km;
  return offset_km(c, dx, dy);
}

std::string numbered(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

struct Place {
  std::size_t entry;  // index into gazetteer
  int cluster;        // event index, or -1 - region index
};

class Builder {
 public:
  explicit Builder(const SynthSpec& spec) : spec_(spec), rng_(spec.seed) {
    for (const auto& lex : bundled_lexicons()) {
      for (auto w : lex.background) reserved_.insert(text::fold(w));
      for (auto w : lex.event_terms) reserved_.insert(text::fold(w));
    }
  }

  GeneratedCorpus run() {
    build_places();
    build_posts();
    build_images();
    build_outputs();
    return std::move(out_);
  }

 private:
  std::string coin_name() {
    auto syl = place_syllables();
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::size_t n = 2 + rng_.uniform_int(2);
      std::string name;
      for (std::size_t i = 0; i < n; ++i) name += syl[rng_.uniform_int(syl.size())];
      name[0] = static_cast<char>(name[0] - 'a' + 'A');
      auto key = text::fold(name);
      if (reserved_.insert(key).second) return name;
    }
    throw Error(ErrorCode::engine, "synth: ran out of place names");
  }

  std::size_t add_entry(GazetteerEntry e) {
    out_.gazetteer.push_back(std::move(e));
    return out_.gazetteer.size() - 1;
  }

  GazetteerEntry make_place(GeoPoint p) {
    static constexpr int kLevels[] = {4, 6, 8};
    GazetteerEntry e;
    e.entry_id = numbered("G", out_.gazetteer.size() + 1, 5);
    // Homonyms exercise disambiguation: reuse a name from another cluster.
    if (!places_.empty() && rng_.bernoulli(spec_.ambiguous_fraction)) {
      e.canonical_name = out_.gazetteer[places_[rng_.uniform_int(places_.size())].entry]
                             .canonical_name;
    } else {
      e.canonical_name = coin_name();
    }
    e.lat = p.lat;
    e.lon = p.lon;
    e.admin_level = kLevels[rng_.uniform_int(3)];
    e.population = 1000 + rng_.uniform_int(500000);
    return e;
  }

  void build_places() {
    std::map<std::string, std::pair<GeoPoint, std::string>> countries;
    for (const auto& ev : spec_.events) {
      countries.try_emplace(ev.country, ev.center, ev.country_name);
    }
    for (const auto& [code, info] : countries) {
      GazetteerEntry e;
      e.entry_id = "C-" + code;
      e.canonical_name = info.second;
      e.lat = info.first.lat;
      e.lon = info.first.lon;
      e.admin_level = 2;
      e.population = 10'000'000;
      e.country = code;
      reserved_.insert(text::fold(e.canonical_name));
      country_entry_[code] = add_entry(std::move(e));
    }
    cluster_places_.resize(spec_.events.size());
    for (std::size_t i = 0; i < spec_.events.size(); ++i) {
      const auto& ev = spec_.events[i];
      for (int k = 0; k < spec_.places_per_cluster; ++k) {
        auto e = make_place(gaussian_around(rng_, ev.center, ev.sigma_km));
        e.country = ev.country;
        std::size_t idx = add_entry(std::move(e));
        places_.push_back({idx, static_cast<int>(i)});
        cluster_places_[i].push_back(idx);
      }
    }
    std::string region_country = spec_.events.empty() ? "ZZ" : spec_.events.front().country;
    for (std::size_t r = 0; r < spec_.regions.size(); ++r) {
      const auto& poly = spec_.regions[r].polygon;
      double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
      for (const auto& p : poly.outer) {
        min_lat = std::min(min_lat, p.lat);
        max_lat = std::max(max_lat, p.lat);
        min_lon = std::min(min_lon, p.lon);
        max_lon = std::max(max_lon, p.lon);
      }
      for (int k = 0; k < spec_.places_per_region; ++k) {
        GeoPoint p{(min_lat + max_lat) / 2, (min_lon + max_lon) / 2};
        for (int attempt = 0; attempt < 100; ++attempt) {
          GeoPoint cand{min_lat + rng_.uniform() * (max_lat - min_lat),
                        min_lon + rng_.uniform() * (max_lon - min_lon)};
          if (geo::point_in_polygon(cand, poly)) {
            p = cand;
            break;
          }
        }
        auto e = make_place(p);
        e.country = region_country;
        std::size_t idx = add_entry(std::move(e));
        places_.push_back({idx, -1 - static_cast<int>(r)});
      }
    }
  }

  const GazetteerEntry& entry(std::size_t i) const { return out_.gazetteer[i]; }

  // Terms tracked per language, with the event terms of the bundled lexicon
  // plus boost-map terms unknown to every lexicon (language-agnostic).
  std::vector<std::string> tracked_terms(const std::string& lang) const {
    std::vector<std::string> terms;
    if (const auto* lex = find_lexicon(lang)) {
      for (auto t : lex->event_terms) terms.emplace_back(t);
    }
    std::set<std::string> extra;
    for (const auto& ev : spec_.events) {
      for (const auto& [t, _] : ev.term_boost) {
        bool known = false;
        for (const auto& lex : bundled_lexicons()) {
          for (auto w : lex.event_terms) known = known || w == t;
          for (auto w : lex.background) known = known || w == t;
        }
        if (!known) extra.insert(t);
      }
    }
    terms.insert(terms.end(), extra.begin(), extra.end());
    return terms;
  }

  std::string pick_language() {
    double u = rng_.uniform();
    double acc = 0.0;
    for (const auto& l : spec_.languages) {
      acc += l.weight;
      if (u < acc) return l.code;
    }
    return spec_.languages.back().code;
  }

  struct Draft {
    Post post;
    std::optional<std::size_t> event;
  };

  Draft make_post(Timestamp ts, std::optional<std::size_t> forced_event) {
    Draft d;
    d.post.created_at = ts;
    d.post.lang = pick_language();
    const auto* lex = find_lexicon(d.post.lang);

    std::vector<std::string> words;
    std::size_t n_words = 6 + rng_.uniform_int(9);
    for (std::size_t i = 0; i < n_words; ++i) {
      if (lex) {
        words.emplace_back(lex->background[rng_.uniform_int(lex->background.size())]);
      } else {
        words.push_back("lorem");
      }
    }

    std::vector<std::size_t> active;
    for (std::size_t e = 0; e < spec_.events.size(); ++e) {
      const auto& ev = spec_.events[e];
      if (ev.start <= ts && ts < ev.end) active.push_back(e);
    }

    auto insert_word = [&](const std::string& w) {
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng_.uniform_int(words.size() + 1)), w);
    };

    if (forced_event) {
      const auto& boosts = spec_.events[*forced_event].term_boost;
      if (!boosts.empty()) {
        auto it = boosts.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng_.uniform_int(boosts.size())));
        insert_word(it->first);
        d.event = forced_event;
      }
    }

    for (const auto& term : terms_by_lang_.at(d.post.lang)) {
      double p = spec_.term_base_rate;
      std::optional<std::size_t> booster;
      for (auto e : active) {
        auto it = spec_.events[e].term_boost.find(term);
        if (it != spec_.events[e].term_boost.end() && spec_.term_base_rate * it->second > p) {
          p = spec_.term_base_rate * it->second;
          booster = e;
        }
      }
      if (rng_.bernoulli(std::min(1.0, p))) {
        if (std::find(words.begin(), words.end(), term) == words.end()) insert_word(term);
        if (booster && !d.event) d.event = booster;
      }
    }

    if (d.event) {
      const auto& ev = spec_.events[*d.event];
      if (rng_.bernoulli(spec_.native_geo_fraction)) {
        d.post.native_geo = gaussian_around(rng_, ev.center, ev.sigma_km);
      } else if (rng_.bernoulli(ev.geo_probability)) {
        const auto& cluster = cluster_places_[*d.event];
        const auto& name = entry(cluster[rng_.uniform_int(cluster.size())]).canonical_name;
        words.push_back(rng_.bernoulli(0.2) ? "#" + name : name);
        if (rng_.bernoulli(spec_.country_mention_probability)) {
          words.push_back(entry(country_entry_.at(ev.country)).canonical_name);
        }
      }
    } else if (!places_.empty() && rng_.bernoulli(spec_.geo_noise_fraction)) {
      words.push_back(entry(places_[rng_.uniform_int(places_.size())].entry).canonical_name);
    }

    if (rng_.bernoulli(0.1)) words.push_back("@user" + std::to_string(rng_.uniform_int(1000)));
    if (rng_.bernoulli(0.1)) words.push_back("https://t.co/x" + std::to_string(rng_.uniform_int(100000)));

    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) d.post.text.push_back(' ');
      d.post.text += words[i];
    }
    d.post.is_repost = rng_.bernoulli(spec_.repost_fraction);

    if (rng_.bernoulli(spec_.media_fraction)) {
      d.post.media.emplace_back();
      if (rng_.bernoulli(spec_.second_image_probability)) d.post.media.emplace_back();
    }
    return d;
  }

  void build_posts() {
    for (const auto& l : spec_.languages) terms_by_lang_[l.code] = tracked_terms(l.code);

    std::vector<Draft> drafts;
    for (int h = 0; h < spec_.duration_hours; ++h) {
      Timestamp t0 = spec_.start + std::chrono::hours{h};
      Timestamp t1 = t0 + std::chrono::hours{1};
      std::vector<Draft> hour;
      std::uint64_t n = rng_.poisson(spec_.base_rate);
      for (std::uint64_t i = 0; i < n; ++i) {
        hour.push_back(make_post(t0 + Seconds{static_cast<long>(rng_.uniform_int(3600))}, std::nullopt));
      }
      for (std::size_t e = 0; e < spec_.events.size(); ++e) {
        const auto& ev = spec_.events[e];
        if (ev.extra_rate <= 0.0 || !(ev.start < t1 && t0 < ev.end)) continue;
        Timestamp lo = std::max(t0, ev.start);
        Timestamp hi = std::min(t1, ev.end);
        auto span = (hi - lo).count();
        std::uint64_t extra = rng_.poisson(ev.extra_rate * static_cast<double>(span) / 3600.0);
        for (std::uint64_t i = 0; i < extra; ++i) {
          hour.push_back(make_post(lo + Seconds{static_cast<long>(rng_.uniform_int(static_cast<std::uint64_t>(span)))}, e));
        }
      }
      std::stable_sort(hour.begin(), hour.end(), [](const Draft& a, const Draft& b) {
        return a.post.created_at < b.post.created_at;
      });
      for (auto& d : hour) drafts.push_back(std::move(d));
      if (spec_.max_posts && drafts.size() >= *spec_.max_posts) break;
    }
    if (spec_.max_posts && drafts.size() > *spec_.max_posts) drafts.resize(*spec_.max_posts);

    std::size_t media_counter = 0;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      auto& d = drafts[i];
      d.post.id = numbered("p", i, 7);
      for (auto& m : d.post.media) {
        m.media_id = numbered("m", media_counter++, 7);
        m.path = m.media_id + ".pgm";
      }
      out_.post_event.push_back(d.event ? std::optional<std::string>(spec_.events[*d.event].event_id)
                                        : std::nullopt);
      out_.posts.push_back(std::move(d.post));
    }
  }

  media::LuminanceImage photo() {
    media::LuminanceImage img(spec_.image_width, spec_.image_height);
    std::uint8_t levels[8][9];
    for (auto& row : levels)
      for (auto& v : row) v = static_cast<std::uint8_t>(rng_.uniform_int(256));
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        int base = levels[y * 8 / img.height][x * 9 / img.width];
        int noise = static_cast<int>(rng_.uniform_int(33) + rng_.uniform_int(33)) - 32;
        img.at(x, y) = static_cast<std::uint8_t>(std::clamp(base + noise, 0, 255));
      }
    }
    return img;
  }

  // Flat palette blocks: at most 2 bits of histogram entropy. Horizontally
  // adjacent blocks always differ so the hash has no ties.
  media::LuminanceImage nonphoto() {
    static constexpr std::uint8_t kPalette[] = {24, 88, 152, 216};
    media::LuminanceImage img(spec_.image_width, spec_.image_height);
    std::uint8_t idx[8][9];
    for (auto& row : idx) {
      for (int c = 0; c < 9; ++c) {
        if (c == 0) {
          row[c] = static_cast<std::uint8_t>(rng_.uniform_int(4));
        } else {
          auto k = static_cast<std::uint8_t>(rng_.uniform_int(3));
          row[c] = k >= row[c - 1] ? k + 1 : k;
        }
      }
    }
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        img.at(x, y) = kPalette[idx[y * 8 / img.height][x * 9 / img.width]];
    return img;
  }

  media::LuminanceImage noisy_copy(const media::LuminanceImage& src) {
    media::LuminanceImage img = src;
    for (auto& p : img.pixels) {
      int v = static_cast<int>(p) + static_cast<int>(rng_.uniform_int(5)) - 2;
      p = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
    return img;
  }

  void build_images() {
    std::vector<std::string> originals;
    for (const auto& post : out_.posts) {
      for (const auto& m : post.media) {
        ImageTruth truth;
        media::LuminanceImage img;
        if (!originals.empty() && rng_.bernoulli(spec_.duplicate_fraction)) {
          const auto& src = originals[rng_.uniform_int(originals.size())];
          img = noisy_copy(out_.images.at(src));
          truth.kind = ImageKind::near_duplicate;
          truth.source_media_id = src;
        } else if (rng_.bernoulli(spec_.nonphoto_fraction)) {
          img = nonphoto();
          truth.kind = ImageKind::nonphoto;
          originals.push_back(m.media_id);
        } else {
          img = photo();
          originals.push_back(m.media_id);
        }
        out_.images.emplace(m.media_id, std::move(img));
        out_.image_truth.emplace(m.media_id, std::move(truth));
      }
    }
  }

  void build_outputs() {
    for (const auto& ev : spec_.events) {
      out_.events.push_back(EventRecord{ev.event_id, ev.event_type, ev.country, ev.start, ev.end,
                                        ev.name.empty() ? ev.event_id : ev.name});
    }
    out_.sample.sample_id = "sample";
    for (std::size_t i = 0; i < out_.posts.size(); ++i) {
      bool labeled = rng_.bernoulli(spec_.sample_fraction);
      if (labeled && !out_.posts[i].is_repost) {
        out_.sample.labels.emplace(out_.posts[i].id, out_.post_event[i].has_value());
      }
    }
    out_.regions = spec_.regions;
    for (const auto& r : spec_.regions) {
      double affected = 0.0;
      for (const auto& ev : spec_.events) {
        if (geo::point_in_polygon(ev.center, r.polygon)) affected += ev.affected;
      }
      out_.impact[r.region_id] = affected;
    }
  }

  const SynthSpec& spec_;
  Xorshift64Star rng_;
  GeneratedCorpus out_;
  std::unordered_set<std::string> reserved_;
  std::vector<Place> places_;
  std::vector<std::vector<std::size_t>> cluster_places_;
  std::map<std::string, std::size_t> country_entry_;
  std::map<std::string, std::vector<std::string>> terms_by_lang_;
};

}  // namespace

GeneratedCorpus generate(const SynthSpec& spec) {
  validate(spec);
  return Builder(spec).run();
}

void write_impact(std::ostream& out, const std::map<std::string, double>& impact) {
  csv::write_row(out, {"region_id", "affected"});
  for (const auto& [id, v] : impact) {
    std::ostringstream s;
    s.precision(15);
    s << v;
    csv::write_row(out, {id, s.str()});
  }
}

std::map<std::string, double> load_impact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open impact file " + path.string());
  auto rows = csv::read_with_header(in, {"region_id", "affected"}, "impact");
  std::map<std::string, double> out;
  for (const auto& row : rows) {
    try {
      double v = std::stod(row.fields[1]);
      if (!(v >= 0.0)) throw std::invalid_argument("negative");
      out[row.fields[0]] = v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "impact row at line " + std::to_string(row.line) +
                                        ": affected must be a non-negative number");
    }
  }
  return out;
}

void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "media");
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("posts.jsonl");
    write_posts(out, corpus.posts);
  }
  for (const auto& [id, img] : corpus.images) media::save_pgm(dir / "media" / (id + ".pgm"), img);
  {
    auto out = open("events.csv");
    write_events(out, corpus.events);
  }
  {
    auto out = open("sample.csv");
    write_sample(out, corpus.sample);
  }
  {
    auto out = open("gazetteer.csv");
    write_gazetteer(out, corpus.gazetteer);
  }
  if (!corpus.regions.empty()) {
    auto out = open("regions.csv");
    write_regions(out, corpus.regions);
    auto impact = open("impact.csv");
    write_impact(impact, corpus.impact);
  }
}

}  // namespace geopulse::synth
