#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "geopulse/core/corpus.h"
#include "geopulse/service/run_registry.h"

namespace httplib {
class Server;
}

namespace geopulse::service {

// Error with an HTTP status and a machine-readable code.
class HttpError : public std::runtime_error {
 public:
  HttpError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

// Maps any exception to (status, {error:{code,message}}).
std::pair<int, nlohmann::json> error_response(const std::exception& e);

struct ServiceOptions {
  std::filesystem::path data_root;  // corpora/, dictionaries/, runs/
  std::size_t workers = 2;          // concurrent pipeline runs
  std::string cors_origin = "*";
};

using Query = std::map<std::string, std::string>;

// Endpoint logic, callable without HTTP. Each method returns the exact
// response body of its endpoint and throws HttpError/Error on failure.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  nlohmann::json components() const;
  nlohmann::json evaluate(const nlohmann::json& body);
  nlohmann::json sweep(const nlohmann::json& body);
  nlohmann::json optimize(const nlohmann::json& body);
  nlohmann::json submit_run(const nlohmann::json& body);
  nlohmann::json run_status(const std::string& run_id) const;
  nlohmann::json list_runs() const;
  nlohmann::json trigger_series(const Query& query);
  nlohmann::json trigger_events(const Query& query);
  nlohmann::json trigger_evaluate(const nlohmann::json& body);
  nlohmann::json aggregate(const Query& query);
  nlohmann::json suggestions(const Query& query);

  // Blocks until every submitted run has finished.
  void wait_for_runs();
  RunRegistry& registry() { return registry_; }
  const ServiceOptions& options() const { return options_; }

  // HTTP front end. bind() returns the bound port (port 0 picks a free one).
  int bind(const std::string& host, int port);
  void listen();
  void stop();

 private:
  std::shared_ptr<const Corpus> corpus(const std::string& corpus_id, bool exclude_reposts);
  std::string default_corpus_id(const Query& query) const;
  std::filesystem::path corpus_dir(const std::string& corpus_id) const;
  void worker_loop();
  void execute_run(const std::string& run_id);
  void install_routes();

  ServiceOptions options_;
  RunRegistry registry_;
  std::unique_ptr<httplib::Server> http_;

  std::mutex corpus_mutex_;
  std::map<std::string, std::shared_ptr<const Corpus>> corpora_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  std::size_t active_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace geopulse::service
