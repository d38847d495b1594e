#include "ctrltab/corpus/stopwords.hpp"

#include <sstream>

namespace ctrltab::corpus {
namespace {
// Generated at configure time from data/stopwords_en_v1.txt.
constexpr std::string_view kStopwordData =
#include "stopwords_en_v1.inc"
    ;
} // namespace

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> kSet = [] {
        std::unordered_set<std::string> s;
        std::istringstream in{std::string(kStopwordData)};
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) s.insert(line);
        }
        return s;
    }();
    return kSet;
}

bool is_stopword(std::string_view token) { return stopwords().count(std::string(token)) != 0; }

} // namespace ctrltab::corpus
