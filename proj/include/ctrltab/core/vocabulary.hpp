#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctrltab {

using TokenId = std::int32_t;

namespace special {
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kBos = 2;
inline constexpr TokenId kEos = 3;
inline constexpr TokenId kSepH = 4;
inline constexpr TokenId kSepT = 5;
inline constexpr TokenId kSepB = 6;
inline constexpr std::size_t kCount = 7;
} // namespace special

class Vocabulary {
public:
    /// Reserved entries only.
    Vocabulary();

    /// Keeps tokens with frequency >= min_freq, most frequent first, ties
    /// broken lexicographically, until the total size reaches max_size.
    /// max_size counts the reserved ids; max_size <= 7 is a ConfigError.
    static Vocabulary build(const std::vector<std::vector<std::string>>& corpus,
                            std::size_t min_freq, std::size_t max_size);

    /// Restores a vocabulary from its id-ordered token list (reserved first).
    static Vocabulary from_tokens(std::vector<std::string> tokens);

    /// Unknown tokens map to UNK.
    TokenId id(std::string_view token) const;
    bool contains(std::string_view token) const;
    const std::string& token(TokenId id) const;
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;
    std::vector<std::string> decode(std::span<const TokenId> ids) const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.tokens_ == b.tokens_;
    }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
};

} // namespace ctrltab
