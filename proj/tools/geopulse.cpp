#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "geopulse/aggregate/aggregate.h"
#include "geopulse/aggregate/choropleth.h"
#include "geopulse/aggregate/spearman.h"
#include "geopulse/core/corpus.h"
#include "geopulse/core/error.h"
#include "geopulse/core/events.h"
#include "geopulse/core/gazetteer.h"
#include "geopulse/core/region.h"
#include "geopulse/core/sample.h"
#include "geopulse/geo/disambiguate.h"
#include "geopulse/pipeline/config.h"
#include "geopulse/pipeline/engine.h"
#include "geopulse/pipeline/metrics.h"
#include "geopulse/pipeline/optimizer.h"
#include "geopulse/pipeline/run_io.h"
#include "geopulse/pipeline/sweep.h"
#include "geopulse/service/server.h"
#include "geopulse/synth/generator.h"
#include "geopulse/trigger/dictionary.h"
#include "geopulse/trigger/loeo.h"

using namespace geopulse;
namespace fs = std::filesystem;

namespace {

void emit(const nlohmann::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot write " + out);
  f << j.dump(2) << '\n';
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');) {
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

fs::path corpus_path(const std::string& cli, const pipeline::PipelineConfig& cfg) {
  if (!cli.empty()) return cli;
  if (cfg.corpus) return *cfg.corpus;
  throw Error(ErrorCode::invalid_argument, "no corpus given (--corpus or \"corpus\" in the config)");
}

std::optional<LabeledSample> sample_for(const std::string& cli, const pipeline::PipelineConfig& cfg, const Corpus& c,
                                        bool required) {
  fs::path p = !cli.empty() ? fs::path(cli) : cfg.sample ? fs::path(*cfg.sample) : c.file("sample.csv");
  if (!fs::exists(p)) {
    if (required) throw Error(ErrorCode::not_found, "sample file not found: " + p.string());
    return std::nullopt;
  }
  return load_sample(p, c.post_ids());
}

std::vector<EventRecord> events_for(const std::string& cli, const Corpus& c) {
  return load_events(cli.empty() ? c.file("events.csv") : fs::path(cli));
}

std::shared_ptr<const Corpus> open_corpus(const fs::path& dir, bool exclude_reposts) {
  ParseOptions opts;
  opts.exclude_reposts = exclude_reposts;
  auto c = std::make_shared<const Corpus>(load_corpus(dir, opts));
  for (const auto& d : c->diagnostics) spdlog::warn("posts.jsonl line {}: {}", d.line, d.reason);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geopulse: event sensing and filtering pipelines for social media streams"};
  app.require_subcommand(1);
  std::string out;

  // synth
  std::string spec_path, synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--spec", spec_path, "synth spec JSON")->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  // dict-build
  std::string corpus_dir, events_path, language = "en", seeds, dict_out;
  trigger::DictionaryOptions dopts;
  auto* dict_cmd = app.add_subcommand("dict-build", "learn a term dictionary from event correlation");
  dict_cmd->add_option("--corpus", corpus_dir)->required();
  dict_cmd->add_option("--events", events_path, "events CSV (default: corpus events.csv)");
  dict_cmd->add_option("--language", language);
  dict_cmd->add_option("--seeds", seeds, "comma-separated seed terms");
  dict_cmd->add_option("--k", dopts.k);
  dict_cmd->add_option("--min-freq", dopts.min_freq);
  dict_cmd->add_option("--min-corr", dopts.min_corr);
  dict_cmd->add_option("--out", dict_out);

  // trigger-train / trigger-eval
  std::string dictionary_path;
  int window = 24;
  double threshold = 0.5, negative_ratio = 1.0;
  trigger::TrainOptions topts;
  auto* train_cmd = app.add_subcommand("trigger-train", "train the trigger classifier on all windows");
  train_cmd->add_option("--corpus", corpus_dir)->required();
  train_cmd->add_option("--dictionary", dictionary_path)->required();
  train_cmd->add_option("--events", events_path);
  train_cmd->add_option("--window", window);
  train_cmd->add_option("--learning-rate", topts.learning_rate);
  train_cmd->add_option("--epochs", topts.epochs);
  train_cmd->add_option("--l2", topts.l2);
  train_cmd->add_option("--out", out);
  auto* eval_trigger_cmd = app.add_subcommand("trigger-eval", "leave-one-event-out evaluation");
  eval_trigger_cmd->add_option("--corpus", corpus_dir)->required();
  eval_trigger_cmd->add_option("--dictionary", dictionary_path)->required();
  eval_trigger_cmd->add_option("--events", events_path);
  eval_trigger_cmd->add_option("--window", window);
  eval_trigger_cmd->add_option("--threshold", threshold);
  eval_trigger_cmd->add_option("--negative-ratio", negative_ratio);
  eval_trigger_cmd->add_option("--out", out);

  // geocode
  std::string gazetteer_path;
  geo::GeocodeOptions gopts;
  auto* geocode_cmd = app.add_subcommand("geocode", "resolve post locations (JSONL)");
  geocode_cmd->add_option("--corpus", corpus_dir)->required();
  geocode_cmd->add_option("--gazetteer", gazetteer_path, "default: corpus gazetteer.csv");
  geocode_cmd->add_option("--alpha", gopts.weights.alpha);
  geocode_cmd->add_option("--beta", gopts.weights.beta);
  geocode_cmd->add_option("--out", out);

  // run / evaluate / sweep / optimize
  std::string config_path, sample_path, run_out, component, param = "threshold", grid, run_dir;
  auto* run_cmd = app.add_subcommand("run", "execute a pipeline and persist the run record");
  run_cmd->add_option("--config", config_path)->required();
  run_cmd->add_option("--corpus", corpus_dir);
  run_cmd->add_option("--sample", sample_path);
  run_cmd->add_option("--out", run_out, "run directory")->required();
  auto* evaluate_cmd = app.add_subcommand("evaluate", "run a pipeline and score it against a labeled sample");
  evaluate_cmd->add_option("--config", config_path)->required();
  evaluate_cmd->add_option("--corpus", corpus_dir);
  evaluate_cmd->add_option("--sample", sample_path);
  evaluate_cmd->add_option("--out", out);
  auto* sweep_cmd = app.add_subcommand("sweep", "metrics across values of one parameter");
  sweep_cmd->add_option("--config", config_path)->required();
  sweep_cmd->add_option("--corpus", corpus_dir);
  sweep_cmd->add_option("--sample", sample_path);
  sweep_cmd->add_option("--component", component)->required();
  sweep_cmd->add_option("--param", param);
  sweep_cmd->add_option("--grid", grid, "comma-separated values (default 0..1 step 0.05)");
  sweep_cmd->add_option("--out", out);
  auto* optimize_cmd = app.add_subcommand("optimize", "reorder components to minimize expected cost");
  optimize_cmd->add_option("--config", config_path)->required();
  optimize_cmd->add_option("--run", run_dir, "profiled run directory");
  optimize_cmd->add_option("--corpus", corpus_dir, "profile by running on this corpus");
  optimize_cmd->add_option("--out", out);

  // aggregate
  std::string regions_path, impact_path, bucket = "day", agg_out;
  auto* agg_cmd = app.add_subcommand("aggregate", "per-region counts, choropleth and rank correlation");
  agg_cmd->add_option("--run", run_dir)->required();
  agg_cmd->add_option("--regions", regions_path)->required();
  agg_cmd->add_option("--impact", impact_path);
  agg_cmd->add_option("--bucket", bucket)->check(CLI::IsMember({"hour", "day"}));
  agg_cmd->add_option("--out", agg_out, "output directory")->required();

  // serve
  int port = 8080;
  std::string host = "127.0.0.1", data_root, cors = "*";
  std::size_t workers = 2;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API for the designer UI");
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--data-root", data_root)->required();
  serve_cmd->add_option("--workers", workers);
  serve_cmd->add_option("--cors-origin", cors);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      auto spec = synth::load_synth_spec(spec_path);
      auto corpus = synth::generate(spec);
      synth::write_corpus(corpus, synth_out);
      std::cout << "wrote " << corpus.posts.size() << " posts, " << corpus.images.size() << " images to "
                << synth_out << '\n';
    } else if (dict_cmd->parsed()) {
      auto c = open_corpus(corpus_dir, true);
      auto events = events_for(events_path, *c);
      auto seed_list = split(seeds);
      auto d = trigger::build_dictionary(c->posts, events, language, seed_list, dopts);
      if (dict_out.empty()) std::cout << trigger::to_json(d).dump(2) << '\n';
      else trigger::save_dictionary(dict_out, d);
    } else if (train_cmd->parsed()) {
      auto c = open_corpus(corpus_dir, true);
      auto events = events_for(events_path, *c);
      auto d = trigger::load_dictionary(dictionary_path);
      auto tokenized = trigger::tokenize_posts(c->posts);
      auto [from, to] = trigger::covering_span(tokenized, d.options.bucket_width);
      auto terms = d.terms();
      auto series = trigger::bucket_term_counts(tokenized, terms, d.options.bucket_width, from, to);
      auto windows = trigger::make_windows(series, events, window);
      auto model = trigger::train(windows, topts);
      if (out.empty()) std::cout << trigger::to_json(model).dump() << '\n';
      else trigger::save_model(out, model);
    } else if (eval_trigger_cmd->parsed()) {
      auto c = open_corpus(corpus_dir, true);
      auto events = events_for(events_path, *c);
      auto d = trigger::load_dictionary(dictionary_path);
      trigger::LoeoOptions lopts;
      lopts.window = window;
      lopts.threshold = threshold;
      lopts.negative_ratio = negative_ratio;
      emit(trigger::to_json(trigger::evaluate_loeo(c->posts, events, d, lopts)), out);
    } else if (geocode_cmd->parsed()) {
      auto c = open_corpus(corpus_dir, true);
      auto gaz = load_gazetteer(gazetteer_path.empty() ? c->file("gazetteer.csv") : fs::path(gazetteer_path));
      std::ofstream file;
      if (!out.empty()) {
        file.open(out, std::ios::binary);
        if (!file) throw Error(ErrorCode::io, "cannot write " + out);
      }
      std::ostream& os = out.empty() ? std::cout : file;
      for (const auto& p : c->posts) {
        if (auto r = geo::geocode(p, gaz, gopts)) os << geo::to_json(*r).dump() << '\n';
      }
    } else if (run_cmd->parsed() || evaluate_cmd->parsed() || sweep_cmd->parsed()) {
      auto cfg = pipeline::load_config(config_path);
      auto c = open_corpus(corpus_path(corpus_dir, cfg), cfg.exclude_reposts);
      pipeline::Engine engine(c);
      if (run_cmd->parsed()) {
        auto sample = sample_for(sample_path, cfg, *c, false);
        auto run = engine.run(cfg);
        run.run_id = fs::path(run_out).filename().string();
        std::optional<pipeline::EvalMetrics> metrics;
        if (sample) metrics = pipeline::evaluate(run, *sample);
        pipeline::save_run(run_out, run, metrics);
        std::cout << "kept " << run.kept_count() << " of " << run.total() << " items; run written to " << run_out
                  << '\n';
      } else if (evaluate_cmd->parsed()) {
        auto sample = *sample_for(sample_path, cfg, *c, true);
        emit(pipeline::to_json(pipeline::evaluate(engine.run(cfg), sample)), out);
      } else {
        auto sample = *sample_for(sample_path, cfg, *c, true);
        std::vector<double> values = pipeline::default_grid();
        if (!grid.empty()) {
          values.clear();
          for (const auto& v : split(grid)) values.push_back(std::stod(v));
        }
        emit(pipeline::to_json(pipeline::sweep(engine, cfg, sample, component, param, values)), out);
      }
    } else if (optimize_cmd->parsed()) {
      auto cfg = pipeline::load_config(config_path);
      std::optional<pipeline::RunRecord> profile;
      if (!run_dir.empty()) {
        profile = pipeline::load_run(run_dir);
      } else if (!corpus_dir.empty()) {
        pipeline::Engine engine(open_corpus(corpus_dir, cfg.exclude_reposts));
        profile = engine.run(cfg);
      }
      emit(pipeline::to_json(pipeline::optimize_order(cfg, profile ? &*profile : nullptr)), out);
    } else if (agg_cmd->parsed()) {
      auto run = pipeline::load_run(run_dir);
      auto regions = load_regions(regions_path);
      auto result = aggregate::aggregate(pipeline::kept_resolutions(run), regions, aggregate::parse_bucket(bucket));
      std::optional<std::map<std::string, double>> impact;
      if (!impact_path.empty()) impact = synth::load_impact(impact_path);
      auto fc = aggregate::export_choropleth(result, regions, impact);
      fs::create_directories(agg_out);
      {
        std::ofstream csv(fs::path(agg_out) / "aggregate.csv", std::ios::binary);
        aggregate::write_aggregate_csv(csv, result);
      }
      if (impact) {
        std::map<std::string, double> counts;
        for (const auto& r : regions) counts[r.region_id] = static_cast<double>(result.totals.at(r.region_id));
        auto rho = aggregate::spearman(counts, *impact);
        fc["metadata"]["spearman"] = aggregate::to_json(rho);
        std::cout << "spearman rho " << rho.rho << " over " << rho.regions.size() << " regions\n";
      }
      emit(fc, (fs::path(agg_out) / "choropleth.geojson").string());
      std::cout << "assigned " << result.resolutions - static_cast<std::size_t>(result.totals.at(aggregate::kUnassigned))
                << " of " << result.resolutions << " resolutions to regions\n";
    } else if (serve_cmd->parsed()) {
      service::ServiceOptions sopts;
      sopts.data_root = data_root;
      sopts.workers = workers;
      sopts.cors_origin = cors;
      service::Service svc(sopts);
      int bound = svc.bind(host, port);
      spdlog::info("listening on http://{}:{} (data root {})", host, bound, data_root);
      svc.listen();
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == ErrorCode::invalid_argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
