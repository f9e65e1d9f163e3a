#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "viewstack/engine.hpp"

namespace httplib {
class Server;
}

namespace viewstack {

/// Environment variable read for the default service port.
inline constexpr const char* kPortEnv = "VIEWSTACK_PORT";
inline constexpr int kDefaultPort = 8080;

/// Port from kPortEnv, or kDefaultPort when unset or invalid.
int default_port();

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Everything a request handler needs, swapped as one immutable unit.
struct Snapshot {
  std::shared_ptr<const Engine> engine;
  std::uint64_t generation = 0;
};

struct ServiceConfig {
  std::string spec_path;
  /// Overrides the spec's dataset path when set.
  std::string data_path;
  bool watch = false;
  std::chrono::milliseconds poll_interval{500};
};

class Service {
 public:
  /// Loads spec and dataset from disk; throws on any load or validation error.
  explicit Service(ServiceConfig config);
  /// In-memory service (no file watching). `base_dir` resolves dataset paths
  /// of specs posted later.
  Service(ResponsiveSpec spec, std::shared_ptr<const Dataset> data, std::string base_dir = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Routes one request. `query` holds decoded query parameters.
  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::map<std::string, std::string>& query, const std::string& body);

  std::shared_ptr<const Snapshot> snapshot() const;
  std::uint64_t generation() const { return snapshot()->generation; }

  /// Re-reads spec and dataset if any watched file changed. Keeps the old
  /// snapshot and records the error when the new files do not load.
  bool reload_if_changed();
  std::string last_reload_error() const;

  /// Binds the HTTP server. Port 0 picks a free port; returns the bound port
  /// or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); starts the watcher when configured.
  void run();
  void stop();

 private:
  void install(std::shared_ptr<const Engine> engine);
  std::shared_ptr<const Engine> load_from_disk() const;
  std::map<std::string, std::filesystem::file_time_type> watched_times() const;
  HttpResponse post_spec(const std::string& body);

  ServiceConfig config_;
  std::string base_dir_;
  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::map<std::string, std::filesystem::file_time_type> times_;
  std::string reload_error_;

  std::unique_ptr<httplib::Server> server_;
  std::thread watcher_;
  std::atomic<bool> stopping_{false};
};

}  // namespace viewstack
