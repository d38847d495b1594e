#include "ctrltab/core/vocabulary.hpp"

#include "ctrltab/util/error.hpp"

#include <algorithm>
#include <map>

namespace ctrltab {
namespace {
const std::vector<std::string>& reserved_tokens() {
    static const std::vector<std::string> kTokens = {
        "<pad>", "<unk>", "<bos>", "<eos>", "<sep_h>", "<sep_t>", "<sep_b>"};
    return kTokens;
}
} // namespace

Vocabulary::Vocabulary() : tokens_(reserved_tokens()) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<TokenId>(i));
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus,
                             std::size_t min_freq, std::size_t max_size) {
    if (max_size <= special::kCount) {
        throw ConfigError("vocabulary max_size must exceed the " +
                          std::to_string(special::kCount) + " reserved ids");
    }
    std::map<std::string, std::size_t> freq;
    for (const auto& seq : corpus) {
        for (const auto& t : seq) ++freq[t];
    }
    const auto& reserved = reserved_tokens();
    std::vector<std::pair<std::string, std::size_t>> ranked;
    for (auto& [tok, n] : freq) {
        if (n < std::max<std::size_t>(min_freq, 1)) continue;
        if (std::find(reserved.begin(), reserved.end(), tok) != reserved.end()) continue;
        ranked.emplace_back(tok, n);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> tokens = reserved;
    for (auto& [tok, n] : ranked) {
        if (tokens.size() >= max_size) break;
        tokens.push_back(tok);
    }
    return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
    const auto& reserved = reserved_tokens();
    if (tokens.size() < reserved.size() ||
        !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
        throw ValidationError("vocabulary must start with the reserved tokens");
    }
    Vocabulary v;
    v.tokens_ = std::move(tokens);
    v.index_.clear();
    v.index_.reserve(v.tokens_.size());
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
        if (!v.index_.emplace(v.tokens_[i], static_cast<TokenId>(i)).second)
            throw ValidationError("vocabulary: duplicate token '" + v.tokens_[i] + "'");
    }
    return v;
}

TokenId Vocabulary::id(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? special::kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
    return index_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(TokenId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
        throw ValidationError("token id " + std::to_string(id) + " out of range");
    return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (TokenId id : ids) out.push_back(token(id));
    return out;
}

} // namespace ctrltab
