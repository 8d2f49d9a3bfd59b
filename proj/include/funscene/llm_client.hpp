#pragma once

#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

#include "funscene/error.hpp"
#include "funscene/random.hpp"
#include "funscene/structured.hpp"
#include "funscene/templates.hpp"

namespace funscene {

struct LlmError : Error {
  LlmError(std::string kind, const std::string& what) : Error(std::move(kind), what) {}
};

struct LlmRequest {
  std::string template_id;
  Bindings bindings;
  std::string prompt;  // rendered template
  std::string key;     // cassette key
};

struct LlmResponse {
  std::string raw_text;
  std::optional<StructNode> parsed;
  std::string parse_error;  // set when `parsed` is empty
};

// Stable key over (template id, bindings). std::map keeps bindings sorted, so
// the JSON dump is canonical.
inline std::string cassette_key(const std::string& template_id, const Bindings& bindings) {
  const nlohmann::json doc{{"template", template_id}, {"bindings", bindings}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
  return buf;
}

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  // Returns the raw completion text; throws LlmError("llm-transport") on failure.
  virtual std::string send(const LlmRequest& request) = 0;
};

// Backend driven by a callable; used for scripted models and tests.
class FunctionBackend final : public LlmBackend {
 public:
  explicit FunctionBackend(std::function<std::string(const LlmRequest&)> fn) : fn_(std::move(fn)) {}
  std::string send(const LlmRequest& request) override { return fn_(request); }

 private:
  std::function<std::string(const LlmRequest&)> fn_;
};

// One record per call: key, template id, bindings, request body, response body.
// Stored as JSON lines.
class Cassette {
 public:
  struct Record {
    std::string key;
    std::string template_id;
    Bindings bindings;
    std::string request;
    std::string response;
  };

  Cassette() = default;

  static Cassette load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open cassette " + path.string());
    Cassette c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        Record r{j.at("key").get<std::string>(), j.value("template_id", std::string{}),
                 j.value("bindings", Bindings{}), j.value("request", std::string{}),
                 j.at("response").get<std::string>()};
        c.add(std::move(r));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return c;
  }

  void add(Record r) {
    std::lock_guard lock(mu_);
    const auto key = r.key;
    records_[key] = std::move(r);
  }

  std::optional<std::string> find(const std::string& key) const {
    std::lock_guard lock(mu_);
    const auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second.response;
  }

  std::map<std::string, Record> records() const { return snapshot(); }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

  // Written sorted by key so re-saving the same calls yields the same bytes.
  void save(const std::filesystem::path& path) const {
    std::lock_guard lock(mu_);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write cassette " + path.string());
    for (const auto& [key, r] : records_) out << to_json(r).dump() << '\n';
  }

  static nlohmann::json to_json(const Record& r) {
    return {{"key", r.key},
            {"template_id", r.template_id},
            {"bindings", r.bindings},
            {"request", r.request},
            {"response", r.response}};
  }

  Cassette(const Cassette& o) : records_(o.snapshot()) {}
  Cassette& operator=(const Cassette& o) {
    auto copy = o.snapshot();
    std::lock_guard lock(mu_);
    records_ = std::move(copy);
    return *this;
  }

 private:
  std::map<std::string, Record> snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  mutable std::mutex mu_;
  std::map<std::string, Record> records_;
};

class ReplayBackend final : public LlmBackend {
 public:
  explicit ReplayBackend(Cassette cassette) : cassette_(std::move(cassette)) {}

  std::string send(const LlmRequest& request) override {
    if (auto hit = cassette_.find(request.key)) return *hit;
    throw LlmError("cassette-miss", "no recorded response for template '" + request.template_id +
                                        "' (key " + request.key + ")");
  }

 private:
  Cassette cassette_;
};

// Forwards to a live backend and records every exchange.
class RecordingBackend final : public LlmBackend {
 public:
  RecordingBackend(std::shared_ptr<LlmBackend> inner, std::shared_ptr<Cassette> sink)
      : inner_(std::move(inner)), sink_(std::move(sink)) {}

  std::string send(const LlmRequest& request) override {
    std::string response = inner_->send(request);
    sink_->add({request.key, request.template_id, request.bindings, request.prompt, response});
    return response;
  }

 private:
  std::shared_ptr<LlmBackend> inner_;
  std::shared_ptr<Cassette> sink_;
};

struct ClientOptions {
  int default_budget = 3;  // attempts per call, including the first
  int max_in_flight = 4;
};

class LlmClient {
 public:
  explicit LlmClient(std::shared_ptr<LlmBackend> backend, ClientOptions options = {})
      : backend_(std::move(backend)), options_(options) {
    if (!backend_) throw InvalidArgument("LLM client needs a backend");
    if (options_.max_in_flight < 1) throw InvalidArgument("max_in_flight must be >= 1");
  }

  const ClientOptions& options() const { return options_; }

  // Renders the template, sends it, and returns the first reply whose
  // structured block parses. Each retry re-sends the full prompt.
  LlmResponse complete(const PromptTemplate& tmpl, const Bindings& bindings, int budget = 0) const {
    if (budget <= 0) budget = options_.default_budget;
    LlmRequest request{tmpl.template_id, bindings, tmpl.render(bindings),
                       cassette_key(tmpl.template_id, bindings)};
    std::string last_error;
    for (int attempt = 0; attempt < budget; ++attempt) {
      LlmResponse response;
      {
        Slot slot(*this);
        response.raw_text = backend_->send(request);
      }
      try {
        response.parsed = parse_structured_block(response.raw_text);
        return response;
      } catch (const ParseError& e) {
        last_error = e.what();
      }
    }
    throw LlmError("llm-parse", "template '" + tmpl.template_id + "': no parseable reply after " +
                                    std::to_string(budget) + " attempt(s): " + last_error);
  }

 private:
  // Caps concurrent requests at max_in_flight.
  class Slot {
   public:
    explicit Slot(const LlmClient& c) : c_(c) {
      std::unique_lock lock(c_.mu_);
      c_.cv_.wait(lock, [&] { return c_.in_flight_ < c_.options_.max_in_flight; });
      ++c_.in_flight_;
    }
    ~Slot() {
      {
        std::lock_guard lock(c_.mu_);
        --c_.in_flight_;
      }
      c_.cv_.notify_one();
    }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    const LlmClient& c_;
  };

  std::shared_ptr<LlmBackend> backend_;
  ClientOptions options_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable int in_flight_ = 0;
};

}  // namespace funscene
