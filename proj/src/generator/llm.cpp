#include "ctrltab/generator/llm.hpp"

#include "ctrltab/generator/prompt.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/hash.hpp"
#include "ctrltab/util/http.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>

namespace ctrltab::generator {
namespace {

class SlotGuard {
public:
    SlotGuard(std::mutex& m, std::condition_variable& cv, std::size_t& in_flight, std::size_t limit)
        : m_(m), cv_(cv), in_flight_(in_flight) {
        std::unique_lock lock(m_);
        cv_.wait(lock, [&] { return in_flight_ < limit; });
        ++in_flight_;
    }
    ~SlotGuard() {
        {
            std::lock_guard lock(m_);
            --in_flight_;
        }
        cv_.notify_one();
    }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::mutex& m_;
    std::condition_variable& cv_;
    std::size_t& in_flight_;
};

} // namespace

LlmClientConfig LlmClientConfig::from_env() {
    LlmClientConfig cfg;
    if (const char* e = std::getenv("CTRLTAB_LLM_ENDPOINT")) cfg.endpoint = e;
    if (const char* t = std::getenv("CTRLTAB_LLM_TIMEOUT_MS")) {
        char* end = nullptr;
        const long ms = std::strtol(t, &end, 10);
        if (end == t || *end != '\0' || ms <= 0) throw ConfigError("CTRLTAB_LLM_TIMEOUT_MS must be a positive integer");
        cfg.timeout = std::chrono::milliseconds(ms);
    }
    return cfg;
}

void LlmClientConfig::validate() const {
    if (endpoint.empty()) throw ConfigError("LLM endpoint is not set (CTRLTAB_LLM_ENDPOINT)");
    util::check_endpoint(endpoint);
    if (timeout.count() <= 0) throw ConfigError("LLM timeout must be positive");
    if (max_in_flight == 0) throw ConfigError("max_in_flight must be at least 1");
    prompt_template(template_id);
}

LlmClient::LlmClient(LlmClientConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

LlmResponse LlmClient::generate(const std::string& prompt) {
    SlotGuard slot(mutex_, slots_, in_flight_, cfg_.max_in_flight);
    util::HttpRetryOptions opts;
    opts.timeout = cfg_.timeout;
    opts.max_retries = cfg_.max_retries;
    opts.backoff = cfg_.backoff;
    opts.auth_env = cfg_.auth_env;
    const std::string tag = "llm prompt=" + util::sha256_hex(prompt).substr(0, 16);
    const auto reply = util::post_json_with_retries(
        cfg_.endpoint, nlohmann::json{{"prompt", prompt}, {"max_tokens", cfg_.max_tokens}}, opts, tag);
    if (!reply.body.is_object() || !reply.body.contains("text") || !reply.body["text"].is_string())
        throw TransportError("LLM reply has no \"text\" field");
    std::string text = reply.body["text"].get<std::string>();
    if (text.empty()) throw ValidationError("LLM returned an empty completion");
    return {std::move(text), reply.retries};
}

LlmResponse llm_generate(const LlmClientConfig& cfg, const std::string& prompt) {
    LlmClient client(cfg);
    return client.generate(prompt);
}

} // namespace ctrltab::generator
