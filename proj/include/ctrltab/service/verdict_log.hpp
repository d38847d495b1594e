#pragma once

#include "ctrltab/service/verdict.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ctrltab::service {

struct LogEntry {
    std::uint64_t seq = 0;
    Verdict verdict;
};

/// Append-only JSONL file of {"seq", "verdict"} records. Each append is
/// flushed and fsynced before it returns.
class VerdictLog {
public:
    /// Opens or creates `path` and replays it. A torn final line (no newline
    /// or unparsable) is dropped and truncated away; damage earlier in the
    /// file, or a non-increasing seq, is a ParseError.
    explicit VerdictLog(std::string path);
    ~VerdictLog();
    VerdictLog(const VerdictLog&) = delete;
    VerdictLog& operator=(const VerdictLog&) = delete;

    const std::vector<LogEntry>& replayed() const { return replayed_; }
    std::uint64_t last_seq() const { return last_seq_; }
    const std::string& path() const { return path_; }

    /// Returns the sequence number assigned to `v`. Throws Error on write
    /// failure, leaving the in-memory seq unchanged.
    std::uint64_t append(const Verdict& v);

private:
    std::string path_;
    int fd_ = -1;
    std::uint64_t last_seq_ = 0;
    std::vector<LogEntry> replayed_;
};

} // namespace ctrltab::service
