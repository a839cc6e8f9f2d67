#include "hearth/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace hearth {

HttpModelClient::HttpModelClient(std::string endpoint, double timeout_seconds) : timeout_(timeout_seconds) {
  const std::string scheme = "http://";
  if (endpoint.rfind(scheme, 0) != 0) throw ClientError("only http:// endpoints are supported: " + endpoint);
  const auto slash = endpoint.find('/', scheme.size());
  origin_ = slash == std::string::npos ? endpoint : endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint.substr(slash);
}

std::string HttpModelClient::complete(const std::string& request_json) {
  httplib::Client cli(origin_);
  const auto secs = static_cast<time_t>(timeout_);
  cli.set_connection_timeout(secs, 0);
  cli.set_read_timeout(secs, 0);
  auto res = cli.Post(path_, request_json, "application/json");
  if (!res) throw ClientError("request to " + origin_ + path_ + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ClientError("endpoint " + origin_ + path_ + " answered HTTP " + std::to_string(res->status));
  return res->body;
}

ScriptedModelClient::ScriptedModelClient(std::vector<std::string> replies) : replies_(std::move(replies)) {}

std::unique_ptr<ScriptedModelClient> ScriptedModelClient::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ClientError("cannot open scripted replies " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ClientError("scripted replies are not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_array()) throw ClientError("scripted replies must be a JSON list");
  std::vector<std::string> replies;
  for (const auto& r : j) replies.push_back(r.dump());
  return std::make_unique<ScriptedModelClient>(std::move(replies));
}

std::string ScriptedModelClient::complete(const std::string& request_json) {
  requests_.push_back(request_json);
  if (next_ >= replies_.size()) throw ClientError("scripted client has no replies left");
  return replies_[next_++];
}

std::unique_ptr<ModelClient> client_from_env(const char* variable) {
  const char* v = std::getenv(variable);
  if (!v || !*v) return nullptr;
  return std::make_unique<HttpModelClient>(v);
}

}  // namespace hearth
