#pragma once

// Chat-completions transport. Kept out of llm_client.hpp so that only the
// translation units that talk to a live server pay for httplib.

#include <cstdlib>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "funscene/llm_client.hpp"

namespace funscene {

struct HttpChatOptions {
  std::string endpoint;  // e.g. http://localhost:11434/v1/chat/completions
  std::string model;
  std::string api_key;   // sent as a bearer token when non-empty
  double temperature = 0.0;
  int timeout_s = 120;
};

// Fills empty fields from FUNSCENE_LLM_ENDPOINT, FUNSCENE_LLM_MODEL and the
// variable named by `key_env`.
inline HttpChatOptions http_options_from_env(HttpChatOptions base, const std::string& key_env = "FUNSCENE_LLM_KEY") {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  if (base.endpoint.empty()) base.endpoint = env("FUNSCENE_LLM_ENDPOINT");
  if (base.model.empty()) base.model = env("FUNSCENE_LLM_MODEL");
  if (base.api_key.empty() && !key_env.empty()) base.api_key = env(key_env.c_str());
  return base;
}

class HttpChatBackend final : public LlmBackend {
 public:
  explicit HttpChatBackend(HttpChatOptions options) : options_(std::move(options)) {
    if (options_.endpoint.empty()) throw ConfigError("LLM endpoint is not configured");
    const auto scheme_end = options_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("LLM endpoint must be an absolute URL");
    const auto path_start = options_.endpoint.find('/', scheme_end + 3);
    origin_ = options_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : options_.endpoint.substr(path_start);
  }

  static nlohmann::json request_body(const HttpChatOptions& options, const std::string& prompt) {
    return {{"model", options.model},
            {"temperature", options.temperature},
            {"stream", false},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  }

  std::string send(const LlmRequest& request) override {
    httplib::Client client(origin_);
    client.set_read_timeout(options_.timeout_s, 0);
    client.set_connection_timeout(10, 0);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
    const auto body = request_body(options_, request.prompt).dump();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) throw LlmError("llm-transport", "request to " + options_.endpoint + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw LlmError("llm-transport", "LLM endpoint returned HTTP " + std::to_string(res->status));
    try {
      const auto doc = nlohmann::json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw LlmError("llm-transport", std::string("unexpected chat response shape: ") + e.what());
    }
  }

 private:
  HttpChatOptions options_;
  std::string origin_;
  std::string path_;
};

}  // namespace funscene
