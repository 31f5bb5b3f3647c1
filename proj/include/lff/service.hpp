#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace lff {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080; // 0 binds any free port
  std::filesystem::path logPath = "usage.jsonl";
  std::optional<std::filesystem::path> dataDir; // saves persist here when set
  std::filesystem::path corpusDir;              // empty: default_corpus_dir()
  double defaultDeadlineSecs = 10;
  double maxDeadlineSecs = 30;
  int poolSize = 0; // 0: hardware concurrency
  int queueDepth = 32;

  /// Defaults overridden by LFF_PORT, LFF_LOG_PATH, LFF_DATA_DIR and
  /// LFF_MAX_DEADLINE_SECS.
  static ServiceConfig from_env();
};

class Service {
public:
  explicit Service(ServiceConfig cfg);
  ~Service();
  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  /// Throws std::runtime_error if the port cannot be bound.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const;
  const ServiceConfig &config() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace lff
