#include "ctrltab/util/http.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/log.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>
#include <thread>

namespace ctrltab::util {
namespace {

struct Endpoint {
    std::string base;
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/\s]+)(/\S*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw ConfigError("invalid endpoint '" + url + "'");
    return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

} // namespace

void check_endpoint(const std::string& url) { split_endpoint(url); }

HttpJsonReply post_json_with_retries(const std::string& url, const nlohmann::json& body,
                                     const HttpRetryOptions& opts, std::string_view tag) {
    const Endpoint ep = split_endpoint(url);
    httplib::Client client(ep.base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!opts.auth_env.empty())
        if (const char* key = std::getenv(opts.auth_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

    const std::string payload = body.dump();
    const std::string label(tag);
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= opts.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(opts.backoff * (1LL << std::min<std::size_t>(attempt - 1, 20)));
        log_info(label + " attempt=" + std::to_string(attempt + 1));
        auto res = client.Post(ep.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            HttpJsonReply reply;
            try {
                reply.body = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception&) {
                throw TransportError(label + ": reply is not JSON");
            }
            reply.retries = attempt;
            log_info(label + " status=" + std::to_string(res->status) + " bytes=" + std::to_string(res->body.size()));
            return reply;
        }
        log_warning(label + " failed: " + last_error);
    }
    throw TransportError(label + ": failed after " + std::to_string(opts.max_retries) + " retries: " + last_error);
}

} // namespace ctrltab::util
