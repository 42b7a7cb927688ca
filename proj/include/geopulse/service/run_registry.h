#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace geopulse::service {

enum class RunStatus { pending, running, done, failed };

std::string to_string(RunStatus s);
std::optional<RunStatus> parse_run_status(const std::string& s);

struct RunEntry {
  std::string run_id;
  RunStatus status = RunStatus::pending;
  std::string corpus_id;
  std::optional<std::string> sample_id;
  nlohmann::json config;             // snapshot as submitted (normalized)
  nlohmann::json summary = nullptr;  // set when done
  std::string error;                 // set when failed
  std::string created_at;
  std::string finished_at;
};

nlohmann::json to_json(const RunEntry& e);
RunEntry run_entry_from_json(const nlohmann::json& j);

// Runs live in ROOT/<run_id>/status.json next to their artifacts. Loading
// marks runs left pending or running by a previous process as failed.
// Mutations are serialized; done and failed runs are immutable.
class RunRegistry {
 public:
  explicit RunRegistry(std::filesystem::path root);

  std::string create(const std::string& corpus_id, const std::optional<std::string>& sample_id,
                     const nlohmann::json& config);
  void mark_running(const std::string& run_id);
  void mark_done(const std::string& run_id, const nlohmann::json& summary);
  void mark_failed(const std::string& run_id, const std::string& error);

  std::optional<RunEntry> get(const std::string& run_id) const;
  std::vector<RunEntry> list() const;  // creation order
  std::filesystem::path dir(const std::string& run_id) const { return root_ / run_id; }

 private:
  void transition(const std::string& run_id, RunStatus to, const nlohmann::json& summary, const std::string& error);
  void persist(const RunEntry& e) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::map<std::string, RunEntry> runs_;
  std::uint64_t next_ = 1;
};

}  // namespace geopulse::service
