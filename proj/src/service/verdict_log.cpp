#include "ctrltab/service/verdict_log.hpp"

#include "ctrltab/util/error.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <sys/stat.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace ctrltab::service {
namespace {

std::string errno_text() { return std::strerror(errno); }

} // namespace

VerdictLog::VerdictLog(std::string path) : path_(std::move(path)) {
    std::string text;
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        if (!in) throw Error("cannot open verdict log: " + path_);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    std::size_t good_end = 0;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        const std::size_t nl = text.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const std::size_t end = terminated ? nl : text.size();
        const std::string line = text.substr(pos, end - pos);
        const bool last = !terminated || end + 1 >= text.size();
        try {
            if (!terminated) throw ValidationError("unterminated record");
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                const auto j = nlohmann::json::parse(line);
                LogEntry e{j.at("seq").get<std::uint64_t>(), verdict_from_json(j.at("verdict"))};
                if (e.seq <= last_seq_)
                    throw ParseError("verdict log " + path_ + " line " + std::to_string(line_no) +
                                         ": sequence number " + std::to_string(e.seq) + " is not increasing",
                                     line_no);
                last_seq_ = e.seq;
                replayed_.push_back(std::move(e));
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            if (!last)
                throw ParseError("verdict log " + path_ + " line " + std::to_string(line_no) + ": " + e.what(),
                                 line_no);
            break;
        }
        good_end = terminated ? nl + 1 : text.size();
        pos = good_end;
    }
    if (good_end < text.size()) std::filesystem::resize_file(path_, good_end);

    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open verdict log " + path_ + " for writing: " + errno_text());
}

VerdictLog::~VerdictLog() {
    if (fd_ >= 0) ::close(fd_);
}

std::uint64_t VerdictLog::append(const Verdict& v) {
    const std::uint64_t seq = last_seq_ + 1;
    nlohmann::ordered_json j;
    j["seq"] = seq;
    j["verdict"] = to_json(v);
    const std::string line = j.dump() + "\n";
    struct stat st {};
    if (::fstat(fd_, &st) != 0) throw Error("cannot stat verdict log " + path_ + ": " + errno_text());
    const auto rollback = [&] { (void)::ftruncate(fd_, st.st_size); };
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const std::string msg = errno_text();
            rollback();
            throw Error("cannot append to verdict log " + path_ + ": " + msg);
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw Error("cannot sync verdict log " + path_ + ": " + errno_text());
    last_seq_ = seq;
    return seq;
}

} // namespace ctrltab::service
