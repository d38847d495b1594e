#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab {

/// A token with its byte span [begin, end) in the source text.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Lowercasing word tokenizer. Whitespace separates tokens, every
/// punctuation code point becomes its own token, and '.' or ',' between two
/// digits stays inside the token so numbers are kept whole.
std::vector<std::string> tokenize(std::string_view text);
std::vector<Token> tokenize_with_spans(std::string_view text);

/// Joins tokens with single spaces.
std::string detokenize(const std::vector<std::string>& tokens);

/// True when every code point of `token` is punctuation.
bool is_punctuation_token(std::string_view token);

/// Parses a token as a number after stripping '%' and thousands commas.
/// Returns false for anything that is not entirely numeric.
bool parse_numeric(std::string_view text, double& out);

} // namespace ctrltab
