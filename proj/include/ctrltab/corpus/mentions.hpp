#pragma once

#include "ctrltab/core/types.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace ctrltab::corpus {

enum class MentionKind { value_exact, numeric, attribute };

std::string_view to_string(MentionKind k);

struct Mention {
    CellRef cell_ref;
    /// Byte range [begin, end) in the sentence.
    std::size_t begin = 0;
    std::size_t end = 0;
    MentionKind kind = MentionKind::value_exact;

    friend bool operator==(const Mention&, const Mention&) = default;
};

/// Reports every mention of `table` in `sentence`, sorted by span start:
///  - value_exact: whole-token, case-insensitive match of a data cell value;
///  - numeric: a sentence number equal to a data cell's numeric value once
///    both are stripped of '%' and commas and rounded to 2 decimals;
///  - attribute: whole-token match of a cell attribute or a header cell.
std::vector<Mention> detect_entity_mentions(std::string_view sentence, const Table& table);

/// Same, restricted to value_exact and numeric mentions.
bool has_value_mention(std::string_view text, const Table& table, CellRef ref);

} // namespace ctrltab::corpus
