#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab {

/// One line of `generate` output.
struct GenerationRecord {
    std::string pair_id;
    std::string output;
    std::vector<std::string> retrieved;
    std::string strategy = "greedy";
    std::size_t beam_width = 1;

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

/// {"pair_id","output","retrieved":[...],"decode":{"strategy","beam_width"}}
std::string format_generation(const GenerationRecord& rec);
std::string format_generations(const std::vector<GenerationRecord>& recs);

/// Throws ParseError naming the line on malformed input.
std::vector<GenerationRecord> parse_generations(std::string_view text);
std::vector<GenerationRecord> read_generations(const std::string& path);

} // namespace ctrltab
