#pragma once

#include "ctrltab/service/state.hpp"
#include "ctrltab/service/verdict_log.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace ctrltab::service {

struct ServiceOptions {
    std::string dataset_path;
    std::string log_path;
    /// Served under / when non-empty.
    std::string static_dir;
};

/// HTTP+JSON annotation API over an AnnotationState persisted in a
/// VerdictLog. Reads run concurrently; verdict writes are serialized and
/// logged before they become visible.
///
///   GET  /api/pairs?split=
///   GET  /api/pairs/{id}?annotator=
///   POST /api/pairs/{id}/verdicts
///   GET  /api/agreement?a=&b=
///   GET  /api/export?adjudicator=&verified_only=
///
/// Errors are {"code", "message"}.
class AnnotationService {
public:
    /// Loads the dataset (Error naming the path when unreadable) and replays
    /// the log (Error when a logged verdict no longer fits the dataset).
    explicit AnnotationService(ServiceOptions opts);
    ~AnnotationService();
    AnnotationService(const AnnotationService&) = delete;
    AnnotationService& operator=(const AnnotationService&) = delete;

    /// Binds host:port (port 0 picks a free one) and returns the port.
    /// Throws Error when the address is unavailable.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Requires bind().
    void run();
    void stop();
    /// Blocks until run() is accepting connections.
    void wait_until_ready();

    /// Validates, logs and applies a verdict; returns its sequence number.
    std::uint64_t submit(Verdict v);

    std::size_t verdict_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace ctrltab::service
