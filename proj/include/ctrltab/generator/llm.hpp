#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>

namespace ctrltab::generator {

struct LlmClientConfig {
    /// http://host:port/path
    std::string endpoint;
    /// Name of the environment variable holding the bearer token; empty or
    /// unset means no Authorization header.
    std::string auth_env = "CTRLTAB_LLM_KEY";
    std::chrono::milliseconds timeout{30000};
    std::size_t max_retries = 3;
    std::chrono::milliseconds backoff{200};
    std::string template_id = "default";
    std::size_t max_tokens = 256;
    std::size_t max_in_flight = 4;

    /// Reads CTRLTAB_LLM_ENDPOINT and CTRLTAB_LLM_TIMEOUT_MS over the defaults.
    static LlmClientConfig from_env();

    void validate() const;
};

struct LlmResponse {
    std::string text;
    std::size_t retries = 0;
};

/// Thread-safe completion client. At most max_in_flight requests run at
/// once; callers beyond that block.
class LlmClient {
public:
    explicit LlmClient(LlmClientConfig cfg);

    /// One POST {prompt, max_tokens}; the reply's "text" field is returned
    /// verbatim. Timeouts, transport failures and non-2xx replies are retried
    /// with exponential backoff; after max_retries a TransportError is
    /// thrown. An empty completion is a ValidationError.
    LlmResponse generate(const std::string& prompt);

    const LlmClientConfig& config() const { return cfg_; }

private:
    LlmClientConfig cfg_;
    std::mutex mutex_;
    std::condition_variable slots_;
    std::size_t in_flight_ = 0;
};

LlmResponse llm_generate(const LlmClientConfig& cfg, const std::string& prompt);

} // namespace ctrltab::generator
