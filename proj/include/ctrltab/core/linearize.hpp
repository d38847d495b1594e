#pragma once

#include "ctrltab/core/types.hpp"
#include "ctrltab/core/vocabulary.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ctrltab {

/// HTB feeds the generator, BTH the retriever.
enum class SegmentOrder { HTB, BTH };

SegmentOrder segment_order_from_string(std::string_view s);

/// Token strings of the three segments, without separators.
struct Segments {
    std::vector<std::string> highlights;
    std::vector<std::string> table;
    std::vector<std::string> knowledge;
};

struct LinearizedInput {
    std::vector<TokenId> token_ids;
    std::size_t l_h = 0;
    std::size_t l_t = 0;
    std::size_t l_b = 0;
    bool truncated = false;
};

/// Renders each cell as "attribute : value |" (row-major), the highlight
/// segment repeating only the highlighted cells, and each knowledge
/// sentence followed by "|".
Segments render_segments(const Table& table, const HighlightSet& highlights,
                         const std::vector<std::string>& knowledge);

/// Prefixes each segment with its separator and emits them in `order`.
/// With `max_len`, trims the knowledge segment from the end first, then the
/// table segment, and only then the highlights, logging a warning.
LinearizedInput assemble(const Segments& segments, SegmentOrder order,
                         const Vocabulary& vocab,
                         std::optional<std::size_t> max_len = std::nullopt);

LinearizedInput linearize(const Table& table, const HighlightSet& highlights,
                          const std::vector<KnowledgeSentence>& kb_selected,
                          SegmentOrder order, const Vocabulary& vocab,
                          std::optional<std::size_t> max_len = std::nullopt);

} // namespace ctrltab
