#pragma once

#include "ctrltab/core/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ctrltab {

/// Canonical single-line JSON encoding of one record (fixed key order, no
/// whitespace, no trailing newline).
std::string format_pair(const PairRecord& pair);

/// Parses one JSON line. `line_no` is only used in error messages.
PairRecord parse_pair(std::string_view line, std::size_t line_no = 1);

/// Parses a JSONL document. Blank lines are skipped.
std::vector<PairRecord> parse_pairs(std::string_view text);
std::string format_pairs(const std::vector<PairRecord>& pairs);

std::vector<PairRecord> read_pairs(const std::string& path);
void write_pairs(const std::string& path, const std::vector<PairRecord>& pairs);

} // namespace ctrltab
