#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hearth/error.hpp"

namespace hearth {

/// JSON-in, JSON-out boundary to an external language model service.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  /// Sends one JSON request body and returns the JSON reply body. Throws ClientError.
  virtual std::string complete(const std::string& request_json) = 0;
};

/// POSTs to a plain http:// endpoint.
class HttpModelClient : public ModelClient {
 public:
  explicit HttpModelClient(std::string endpoint, double timeout_seconds = 60.0);
  std::string complete(const std::string& request_json) override;

 private:
  std::string origin_;
  std::string path_;
  double timeout_;
};

/// Replays canned replies in order and records every request.
class ScriptedModelClient : public ModelClient {
 public:
  explicit ScriptedModelClient(std::vector<std::string> replies);
  /// File holds a JSON list; each element is one reply body.
  static std::unique_ptr<ScriptedModelClient> from_file(const std::filesystem::path& path);

  std::string complete(const std::string& request_json) override;
  const std::vector<std::string>& requests() const { return requests_; }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  std::vector<std::string> requests_;
};

/// HTTP client for the endpoint named by the environment variable, or null when unset.
std::unique_ptr<ModelClient> client_from_env(const char* variable);

}  // namespace hearth
