#pragma once

#include <string_view>
#include <unordered_set>
#include <string>

namespace ctrltab::corpus {

inline constexpr std::string_view kStopwordListVersion = "en-v1";

/// The shipped 127-word English list (data/stopwords_en_v1.txt).
const std::unordered_set<std::string>& stopwords();

bool is_stopword(std::string_view token);

} // namespace ctrltab::corpus
