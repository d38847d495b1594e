#include "ctrltab/corpus/article.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/log.hpp"

#include <expat.h>

#include <algorithm>
#include <array>
#include <memory>
#include <set>

namespace ctrltab::corpus {
namespace {

constexpr std::array<std::string_view, 19> kAbbreviations = {
    "al.",  "Fig.", "Figs.", "fig.", "Eq.",  "Eqs.", "eq.",  "e.g.", "i.e.", "cf.",
    "vs.",  "Tab.", "Sec.",  "Ref.", "Refs.", "Dr.", "No.",  "approx.", "resp."};

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool is_abbreviation(std::string_view word) {
    while (!word.empty() && (word.front() == '(' || word.front() == '[' || word.front() == '"'))
        word.remove_prefix(1);
    if (word.size() == 2 && is_upper(word[0])) return true; // initials such as "J."
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (is_ws(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += c;
        }
    }
    return out;
}

struct ParseState {
    Article article;
    std::vector<std::string> stack;
    bool root_seen = false;
    int p_depth = 0;
    int caption_depth = 0;
    std::string current_table;
    std::string paragraph;
    std::string caption;
    std::set<std::string> ignored;
    std::string schema_error;
    XML_Parser parser = nullptr;
};

const char* find_attr(const XML_Char** attrs, const char* name) {
    for (int i = 0; attrs[i]; i += 2) {
        if (std::string_view(attrs[i]) == name) return attrs[i + 1];
    }
    return nullptr;
}

void flush_paragraph(ParseState& st) {
    const std::string text = collapse_ws(st.paragraph);
    st.paragraph.clear();
    if (text.empty()) return;
    if (!st.article.text.empty()) st.article.text += "\n\n";
    const std::size_t base = st.article.text.size();
    st.article.text += text;
    for (auto& [off, sentence] : split_sentences(text)) {
        ArticleSentence s;
        s.index = st.article.sentences.size();
        s.text = std::move(sentence);
        s.char_offset = base + off;
        st.article.sentences.push_back(std::move(s));
    }
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
    auto& st = *static_cast<ParseState*>(user);
    const std::string_view tag(name);
    if (!st.root_seen) {
        st.root_seen = true;
        if (tag != "article") {
            st.schema_error = "unknown root element <" + std::string(tag) + ">";
            XML_StopParser(st.parser, XML_FALSE);
            return;
        }
        if (const char* id = find_attr(attrs, "id")) st.article.id = id;
        st.stack.emplace_back(tag);
        return;
    }
    const bool in_table = !st.current_table.empty();
    if (tag == "sec" && !in_table && st.p_depth == 0) {
        // structural only
    } else if (tag == "p" && !in_table) {
        ++st.p_depth;
    } else if (tag == "table-wrap" && !in_table && st.p_depth == 0) {
        const char* id = find_attr(attrs, "id");
        st.current_table = id ? id : "";
        if (st.current_table.empty()) {
            st.current_table = "table-" + std::to_string(st.article.table_ids.size());
        }
        st.article.table_ids.push_back(st.current_table);
    } else if (tag == "caption" && in_table) {
        ++st.caption_depth;
    } else if (st.p_depth == 0 && st.caption_depth == 0) {
        st.ignored.insert(std::string(tag));
    } else if (tag != "p") {
        st.ignored.insert(std::string(tag));
    }
    st.stack.emplace_back(tag);
}

void XMLCALL on_end(void* user, const XML_Char* name) {
    auto& st = *static_cast<ParseState*>(user);
    const std::string_view tag(name);
    if (!st.stack.empty()) st.stack.pop_back();
    if (tag == "p" && st.current_table.empty() && st.p_depth > 0) {
        if (--st.p_depth == 0) flush_paragraph(st);
    } else if (tag == "caption" && st.caption_depth > 0) {
        if (--st.caption_depth == 0) {
            st.article.table_captions[st.current_table] = collapse_ws(st.caption);
            st.caption.clear();
        }
    } else if (tag == "table-wrap" && !st.current_table.empty() && st.caption_depth == 0) {
        st.current_table.clear();
    }
}

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
    auto& st = *static_cast<ParseState*>(user);
    if (st.caption_depth > 0) {
        st.caption.append(s, static_cast<std::size_t>(len));
    } else if (st.p_depth > 0) {
        st.paragraph.append(s, static_cast<std::size_t>(len));
    }
}

} // namespace

std::vector<std::pair<std::size_t, std::string>> split_sentences(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string>> out;
    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_ws(text[begin])) ++begin;
        while (end > begin && is_ws(text[end - 1])) --end;
        if (end > begin) out.emplace_back(begin, std::string(text.substr(begin, end - begin)));
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '?' && c != '!') continue;
        std::size_t j = i + 1;
        if (j >= text.size() || !is_ws(text[j])) continue;
        while (j < text.size() && is_ws(text[j])) ++j;
        if (j >= text.size() || !is_upper(text[j])) continue;
        if (c == '.') {
            std::size_t w = i;
            while (w > start && !is_ws(text[w - 1])) --w;
            if (is_abbreviation(text.substr(w, i + 1 - w))) continue;
        }
        emit(start, i + 1);
        start = j;
        i = j - 1;
    }
    emit(start, text.size());
    return out;
}

Article parse_article_xml(std::string_view xml) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreate("UTF-8"), &XML_ParserFree);
    if (!parser) throw Error("xml: cannot create parser");
    ParseState st;
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);

    const auto status =
        XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE);
    if (!st.schema_error.empty()) throw ValidationError("xml schema: " + st.schema_error);
    if (status != XML_STATUS_OK) {
        const auto offset = XML_GetCurrentByteIndex(parser.get());
        const std::size_t pos = offset < 0 ? xml.size() : static_cast<std::size_t>(offset);
        throw ParseError("xml: " + std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) +
                             " at byte " + std::to_string(pos),
                         pos);
    }
    if (!st.root_seen) throw ParseError("xml: no root element", 0);
    if (!st.ignored.empty()) {
        std::string names;
        for (const auto& n : st.ignored) names += (names.empty() ? "" : ", ") + n;
        util::log_warning("article '" + st.article.id + "': ignored elements: " + names);
    }
    return std::move(st.article);
}

} // namespace ctrltab::corpus
