#pragma once

#include "ctrltab/core/types.hpp"
#include "ctrltab/corpus/article.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::corpus {

struct AlignOptions {
    double theta_overlap = 0.15;
    std::size_t cap = 40;
};

/// Distinct lowercased tokens of `text` minus stopwords and punctuation.
std::vector<std::string> content_tokens(std::string_view text);

/// Fraction of a sentence's distinct content tokens that occur in the
/// table's cells or caption. 0 when the sentence has no content tokens.
double overlap_score(std::string_view sentence, const Table& table);

/// Greedy content matching for all tables of one article. A sentence is a
/// candidate for a table when its overlap score reaches theta_overlap and it
/// mentions the table at least once; a sentence qualifying for several
/// tables goes only to its best-scoring one (earlier table on ties). Each
/// table then keeps its candidates in descending score (document order on
/// ties) up to `cap`. Result i belongs to tables[i].
std::vector<std::vector<KnowledgeSentence>> greedy_align_all(
    const std::vector<const Table*>& tables, const Article& article, const AlignOptions& opts);

std::vector<KnowledgeSentence> greedy_align(const Table& table, const Article& article,
                                            const AlignOptions& opts);

/// Token-level F1 on bags of non-punctuation tokens.
double token_f1(std::string_view a, std::string_view b);

/// Drops candidates whose F1 against any description sentence is at least
/// theta_dup, or whose normalized text contains or is contained in the
/// normalized description. Order preserved.
std::vector<KnowledgeSentence> dedup_against_description(
    const std::vector<KnowledgeSentence>& candidates, std::string_view description,
    double theta_dup);

/// Cells whose value (exactly or numerically) appears in the description.
HighlightSet auto_highlight(const Table& table, std::string_view description);

} // namespace ctrltab::corpus
