#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace ctrltab::util {

/// Reads a whole file. Throws Error naming the path on failure.
std::string read_file(const std::string& path);

/// Writes to `path.tmp` then renames over `path`, so readers never see a
/// partially written artifact.
void write_file_atomic(const std::string& path, std::string_view contents);

/// Calls fn(line, line_no) for each non-blank line (1-based numbering, a
/// trailing '\r' stripped).
void for_each_line(std::string_view text,
                   const std::function<void(std::string_view line, std::size_t line_no)>& fn);

} // namespace ctrltab::util
