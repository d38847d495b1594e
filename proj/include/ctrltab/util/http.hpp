#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>

namespace ctrltab::util {

struct HttpRetryOptions {
    std::chrono::milliseconds timeout{30000};
    std::size_t max_retries = 3;
    std::chrono::milliseconds backoff{200};
    /// Environment variable holding a bearer token; empty or unset sends none.
    std::string auth_env;
};

struct HttpJsonReply {
    nlohmann::json body;
    std::size_t retries = 0;
};

/// Throws ConfigError unless `url` looks like http(s)://host[:port][/path].
void check_endpoint(const std::string& url);

/// POSTs `body` as JSON. Transport failures, timeouts and non-2xx statuses
/// are retried with exponential backoff (backoff, 2*backoff, ...); after
/// max_retries a TransportError is thrown. A 2xx reply that is not JSON is
/// a TransportError without retry. `tag` labels the log lines.
HttpJsonReply post_json_with_retries(const std::string& url, const nlohmann::json& body,
                                     const HttpRetryOptions& opts, std::string_view tag);

} // namespace ctrltab::util
