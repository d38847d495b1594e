#include "ctrltab/core/tokenize.hpp"

#include <cstdlib>

namespace ctrltab {
namespace {

struct CodePoint {
    char32_t value;
    std::size_t length;
};

// Invalid sequences decode as U+FFFD with length 1 so tokenization never fails.
CodePoint decode_utf8(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (i + len > s.size()) return {0xFFFD, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
           c == 0x00A0 || (c >= 0x2000 && c <= 0x200B) || c == 0x2028 || c == 0x2029 ||
           c == 0x202F || c == 0x205F || c == 0x3000 || c == 0xFEFF;
}

bool is_punct(char32_t c) {
    if (c < 0x80) {
        return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
               (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
    }
    return (c >= 0x00A1 && c <= 0x00BF) || c == 0x00D7 || c == 0x00F7 ||
           (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
           (c >= 0x2190 && c <= 0x22FF) || (c >= 0x3001 && c <= 0x303F) ||
           (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
           (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65);
}

bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

char32_t to_lower(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    if (c < 0x80) return c;
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
    if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 0x20;
    if (c >= 0x0410 && c <= 0x042F) return c + 0x20;
    if (c >= 0x0400 && c <= 0x040F) return c + 0x50;
    return c;
}

} // namespace

std::vector<Token> tokenize_with_spans(std::string_view text) {
    std::vector<Token> out;
    Token current;
    bool open = false;
    char32_t prev = 0;
    auto flush = [&] {
        if (open) out.push_back(std::move(current));
        current = Token{};
        open = false;
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const CodePoint cp = decode_utf8(text, i);
        const std::size_t next = i + cp.length;
        if (is_space(cp.value)) {
            flush();
        } else if (is_punct(cp.value)) {
            const bool inside_number = (cp.value == '.' || cp.value == ',') && open &&
                                       is_digit(prev) && next < text.size() &&
                                       is_digit(static_cast<unsigned char>(text[next]));
            if (inside_number) {
                current.text += static_cast<char>(cp.value);
                current.end = next;
            } else {
                flush();
                Token p;
                append_utf8(p.text, cp.value);
                p.begin = i;
                p.end = next;
                out.push_back(std::move(p));
            }
        } else {
            if (!open) {
                current.begin = i;
                open = true;
            }
            append_utf8(current.text, to_lower(cp.value));
            current.end = next;
        }
        prev = cp.value;
        i = next;
    }
    flush();
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize_with_spans(text)) out.push_back(std::move(t.text));
    return out;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

bool is_punctuation_token(std::string_view token) {
    if (token.empty()) return false;
    std::size_t i = 0;
    while (i < token.size()) {
        const CodePoint cp = decode_utf8(token, i);
        if (!is_punct(cp.value)) return false;
        i += cp.length;
    }
    return true;
}

bool parse_numeric(std::string_view text, double& out) {
    std::string cleaned;
    bool has_digit = false;
    for (char c : text) {
        if (c == '%' || c == ',') continue;
        if (is_digit(static_cast<unsigned char>(c))) {
            has_digit = true;
        } else if (c != '.' && c != '-' && c != '+') {
            return false;
        }
        cleaned += c;
    }
    if (!has_digit) return false;
    char* end = nullptr;
    const double v = std::strtod(cleaned.c_str(), &end);
    if (end != cleaned.c_str() + cleaned.size()) return false;
    out = v;
    return true;
}

} // namespace ctrltab
