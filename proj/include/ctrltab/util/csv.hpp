#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::util {

using CsvRow = std::vector<std::string>;

/// RFC 4180 field quoting: quotes only when the field contains a comma,
/// quote, CR or LF.
std::string csv_escape(std::string_view field);
std::string csv_format_row(const CsvRow& row);

/// Parses a full CSV document. Quoted fields may span lines.
/// Throws ParseError with the 1-based line number on unterminated quotes.
std::vector<CsvRow> csv_parse(std::string_view text);

} // namespace ctrltab::util
