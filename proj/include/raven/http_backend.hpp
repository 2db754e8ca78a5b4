#pragma once

// OpenAI-style completions backend. Kept apart from scorer.hpp so that only
// code talking to a real server pulls in the HTTP client.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "raven/scorer.hpp"

namespace raven {

/// Request body for echo scoring: nothing is generated, the prompt's own
/// token log-probabilities come back.
inline nlohmann::json echo_request(std::string_view model, std::string_view text) {
  nlohmann::json body = {{"prompt", text}, {"max_tokens", 0}, {"echo", true}, {"logprobs", 0},
                         {"temperature", 0}};
  if (!model.empty()) body["model"] = model;
  return body;
}

/// Parses choices[0].logprobs of an echo response. The first token has no
/// conditional probability (null) and is counted but not summed.
inline TokenScore parse_echo_response(const nlohmann::json& j) {
  try {
    const auto& lp = j.at("choices").at(0).at("logprobs");
    const auto& tokens = lp.at("tokens");
    const auto& values = lp.at("token_logprobs");
    if (!tokens.is_array() || !values.is_array() || tokens.size() != values.size() || tokens.empty())
      throw ScoringError(ScoringError::Kind::Malformed, "token and logprob arrays disagree");
    TokenScore s;
    s.token_count = static_cast<int>(tokens.size());
    for (const auto& v : values) {
      if (v.is_null()) continue;
      if (!v.is_number()) throw ScoringError(ScoringError::Kind::Malformed, "non-numeric logprob");
      s.logprob_sum += v.get<double>();
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ScoringError(ScoringError::Kind::Malformed, std::string("malformed echo response: ") + e.what());
  }
}

/// OpenAI-style completions endpoint with echo scoring.
class HttpCompletionBackend : public Backend {
 public:
  explicit HttpCompletionBackend(BackendSpec spec)
      : spec_(std::move(spec)), limiter_(spec_.requests_per_minute) {
    if (spec_.endpoint.empty()) throw std::invalid_argument("http backend requires an endpoint");
    const auto scheme_end = spec_.endpoint.find("://");
    const auto path_start =
        spec_.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    base_ = spec_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : spec_.endpoint.substr(path_start);
    if (const char* key = std::getenv(spec_.api_key_env.c_str())) api_key_ = key;
  }

  std::string id() const override { return "http:" + spec_.endpoint + "#" + spec_.model; }

  TokenScore score(std::string_view text, std::string_view) override {
    const auto body = echo_request(spec_.model, text).dump();
    std::string last_error;
    for (int attempt = 0; attempt <= spec_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(spec_.backoff_seconds * (1 << (attempt - 1))));
      limiter_.acquire();
      ++requests_;
      httplib::Client cli(base_);
      const auto t = std::chrono::duration<double>(spec_.timeout_seconds);
      cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
      cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
      auto res = cli.Post(path_, headers, body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception&) {
          throw ScoringError(ScoringError::Kind::Malformed, "response is not JSON");
        }
        return parse_echo_response(j);
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (looks_like_overflow(res->body))
        throw ScoringError(ScoringError::Kind::ContextOverflow, "context length exceeded: " + res->body);
      throw ScoringError(ScoringError::Kind::Malformed,
                         "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    throw ScoringError(ScoringError::Kind::Transport,
                       last_error + " after " + std::to_string(spec_.max_retries + 1) + " attempts");
  }

  /// Requests actually sent, retries included.
  long requests() const { return requests_.load(); }

 private:
  static bool looks_like_overflow(const std::string& body) {
    return body.find("context_length_exceeded") != std::string::npos ||
           body.find("maximum context length") != std::string::npos;
  }

  BackendSpec spec_;
  RateLimiter limiter_;
  std::string base_, path_, api_key_;
  std::atomic<long> requests_{0};
};

inline std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
  switch (spec.kind) {
    case BackendSpec::Kind::Http: return std::make_unique<HttpCompletionBackend>(spec);
    case BackendSpec::Kind::MockUniform: return std::make_unique<MockUniform>();
    case BackendSpec::Kind::MockOracle: return std::make_unique<MockOracle>();
    case BackendSpec::Kind::MockLengthBiased: return std::make_unique<MockLengthBiased>();
  }
  throw std::invalid_argument("unknown backend kind");
}

/// Backend for a spec, wrapped in a disk cache when `cache_dir` is set.
struct BackendHandle {
  std::unique_ptr<Backend> base;
  std::unique_ptr<CachedBackend> cached;
  Backend& get() { return cached ? static_cast<Backend&>(*cached) : *base; }
};

inline BackendHandle open_backend(const BackendSpec& spec, const std::string& cache_dir = {}) {
  BackendHandle h;
  h.base = make_backend(spec);
  if (!cache_dir.empty()) h.cached = std::make_unique<CachedBackend>(*h.base, std::filesystem::path(cache_dir));
  return h;
}

}  // namespace raven
