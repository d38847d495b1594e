#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::corpus {

struct ArticleSentence {
    std::size_t index = 0;
    std::string text;
    /// Byte offset of the sentence within Article::text.
    std::size_t char_offset = 0;
};

/// Plain-text view of an article: paragraphs joined by blank lines, split
/// into sentences, plus the ids and captions of its tables.
struct Article {
    std::string id;
    std::string text;
    std::vector<ArticleSentence> sentences;
    std::vector<std::string> table_ids;
    std::map<std::string, std::string> table_captions;
};

/// Parses the minimal article schema: <article id> root, <sec>/<p> text and
/// <table-wrap id><caption>. Unknown elements are skipped with a warning,
/// though text inside a paragraph is kept. Throws ParseError carrying the
/// byte offset on malformed XML and ValidationError on a foreign root.
Article parse_article_xml(std::string_view xml);

/// Rule-based splitter: breaks after '.', '?' or '!' when followed by
/// whitespace and an uppercase letter, unless the word ending there is a
/// known abbreviation. Returns (offset, text) pieces with offsets relative
/// to `paragraph`.
std::vector<std::pair<std::size_t, std::string>> split_sentences(std::string_view paragraph);

} // namespace ctrltab::corpus
