#include "geopulse/service/run_registry.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "geopulse/core/error.h"
#include "geopulse/core/time.h"

namespace geopulse::service {

using nlohmann::json;

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::pending: return "pending";
    case RunStatus::running: return "running";
    case RunStatus::done: return "done";
    case RunStatus::failed: return "failed";
  }
  return "failed";
}

std::optional<RunStatus> parse_run_status(const std::string& s) {
  for (auto st : {RunStatus::pending, RunStatus::running, RunStatus::done, RunStatus::failed}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

nlohmann::json to_json(const RunEntry& e) {
  json j = {{"run_id", e.run_id}, {"status", to_string(e.status)}, {"corpus_id", e.corpus_id},
            {"config", e.config}, {"summary", e.summary}, {"created_at", e.created_at}};
  j["sample_id"] = e.sample_id ? json(*e.sample_id) : json(nullptr);
  if (!e.error.empty()) j["error"] = e.error;
  if (!e.finished_at.empty()) j["finished_at"] = e.finished_at;
  return j;
}

RunEntry run_entry_from_json(const nlohmann::json& j) {
  RunEntry e;
  e.run_id = j.at("run_id").get<std::string>();
  e.status = parse_run_status(j.at("status").get<std::string>()).value_or(RunStatus::failed);
  e.corpus_id = j.value("corpus_id", std::string{});
  if (j.contains("sample_id") && j["sample_id"].is_string()) e.sample_id = j["sample_id"].get<std::string>();
  e.config = j.value("config", json(nullptr));
  e.summary = j.value("summary", json(nullptr));
  e.error = j.value("error", std::string{});
  e.created_at = j.value("created_at", std::string{});
  e.finished_at = j.value("finished_at", std::string{});
  return e;
}

namespace {

std::string now() {
  return format_timestamp(std::chrono::floor<Seconds>(std::chrono::system_clock::now()));
}

}  // namespace

RunRegistry::RunRegistry(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
  for (const auto& d : std::filesystem::directory_iterator(root_)) {
    auto status = d.path() / "status.json";
    if (!d.is_directory() || !std::filesystem::exists(status)) continue;
    try {
      std::ifstream in(status);
      RunEntry e = run_entry_from_json(json::parse(in));
      if (e.status == RunStatus::pending || e.status == RunStatus::running) {
        e.status = RunStatus::failed;
        e.error = "interrupted: the service stopped before the run finished";
        e.finished_at = now();
        persist(e);
      }
      unsigned long long n = 0;
      if (std::sscanf(e.run_id.c_str(), "run-%llu", &n) == 1) next_ = std::max<std::uint64_t>(next_, n + 1);
      runs_[e.run_id] = std::move(e);
    } catch (const std::exception&) {
      // Unreadable status: leave the directory alone.
    }
  }
}

void RunRegistry::persist(const RunEntry& e) const {
  auto dir = root_ / e.run_id;
  std::filesystem::create_directories(dir);
  auto tmp = dir / "status.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out << to_json(e).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, dir / "status.json");
}

std::string RunRegistry::create(const std::string& corpus_id, const std::optional<std::string>& sample_id,
                                const nlohmann::json& config) {
  std::lock_guard lock(mutex_);
  char buf[32];
  std::snprintf(buf, sizeof buf, "run-%06llu", static_cast<unsigned long long>(next_++));
  RunEntry e;
  e.run_id = buf;
  e.corpus_id = corpus_id;
  e.sample_id = sample_id;
  e.config = config;
  e.created_at = now();
  persist(e);
  runs_[e.run_id] = e;
  return e.run_id;
}

void RunRegistry::transition(const std::string& run_id, RunStatus to, const nlohmann::json& summary,
                             const std::string& error) {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) throw Error(ErrorCode::not_found, "unknown run " + run_id);
  RunEntry e = it->second;
  if (e.status == RunStatus::done || e.status == RunStatus::failed) {
    throw Error(ErrorCode::contract, "run " + run_id + " is " + to_string(e.status) + " and cannot change");
  }
  e.status = to;
  if (to == RunStatus::done) e.summary = summary;
  if (to == RunStatus::failed) e.error = error;
  if (to == RunStatus::done || to == RunStatus::failed) e.finished_at = now();
  persist(e);
  it->second = std::move(e);
}

void RunRegistry::mark_running(const std::string& run_id) { transition(run_id, RunStatus::running, nullptr, ""); }
void RunRegistry::mark_done(const std::string& run_id, const nlohmann::json& summary) {
  transition(run_id, RunStatus::done, summary, "");
}
void RunRegistry::mark_failed(const std::string& run_id, const std::string& error) {
  transition(run_id, RunStatus::failed, nullptr, error);
}

std::optional<RunEntry> RunRegistry::get(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return std::nullopt;
  return it->second;
}

std::vector<RunEntry> RunRegistry::list() const {
  std::lock_guard lock(mutex_);
  std::vector<RunEntry> out;
  for (const auto& [_, e] : runs_) out.push_back(e);
  return out;
}

}  // namespace geopulse::service
