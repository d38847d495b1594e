#include "ctrltab/corpus/mentions.hpp"

#include "ctrltab/core/tokenize.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace ctrltab::corpus {
namespace {

// Every start index where `needle` occurs as a contiguous token run.
std::vector<std::size_t> find_runs(const std::vector<Token>& hay,
                                   const std::vector<std::string>& needle) {
    std::vector<std::size_t> out;
    if (needle.empty() || needle.size() > hay.size()) return out;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        bool ok = true;
        for (std::size_t k = 0; k < needle.size() && ok; ++k) ok = hay[i + k].text == needle[k];
        if (ok) out.push_back(i);
    }
    return out;
}

bool all_punctuation(const std::vector<std::string>& toks) {
    return std::all_of(toks.begin(), toks.end(),
                       [](const std::string& t) { return is_punctuation_token(t); });
}

long long hundredths(double v) { return std::llround(v * 100.0); }

void add_runs(std::vector<Mention>& out, const std::vector<Token>& sent,
              const std::vector<std::string>& needle, CellRef ref, MentionKind kind) {
    if (needle.empty() || all_punctuation(needle)) return;
    for (std::size_t i : find_runs(sent, needle)) {
        out.push_back({ref, sent[i].begin, sent[i + needle.size() - 1].end, kind});
    }
}

void add_numeric(std::vector<Mention>& out, const std::vector<Token>& sent,
                 const std::vector<long long>& sent_numbers, const std::vector<bool>& is_number,
                 const Cell& cell) {
    double v = 0;
    std::string value = cell.value;
    value.erase(std::remove(value.begin(), value.end(), ' '), value.end());
    if (!parse_numeric(value, v)) return;
    const long long target = hundredths(v);
    for (std::size_t i = 0; i < sent.size(); ++i) {
        if (is_number[i] && sent_numbers[i] == target) {
            out.push_back({cell.ref(), sent[i].begin, sent[i].end, MentionKind::numeric});
        }
    }
}

std::vector<Mention> detect(const std::vector<Token>& sent, const Table& table,
                            bool values_only) {
    std::vector<long long> numbers(sent.size(), 0);
    std::vector<bool> is_number(sent.size(), false);
    for (std::size_t i = 0; i < sent.size(); ++i) {
        double v = 0;
        if (parse_numeric(sent[i].text, v)) {
            numbers[i] = hundredths(v);
            is_number[i] = true;
        }
    }
    std::vector<Mention> out;
    for (const Cell* c : table.row_major()) {
        if (c->is_header) {
            if (!values_only) add_runs(out, sent, tokenize(c->value), c->ref(), MentionKind::attribute);
        } else {
            add_runs(out, sent, tokenize(c->value), c->ref(), MentionKind::value_exact);
            add_numeric(out, sent, numbers, is_number, *c);
        }
        if (!values_only) add_runs(out, sent, tokenize(c->attribute), c->ref(), MentionKind::attribute);
    }
    auto key = [](const Mention& m) {
        return std::make_tuple(m.begin, m.end, m.cell_ref, static_cast<int>(m.kind));
    };
    std::sort(out.begin(), out.end(),
              [&](const Mention& a, const Mention& b) { return key(a) < key(b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

std::string_view to_string(MentionKind k) {
    switch (k) {
    case MentionKind::value_exact: return "value_exact";
    case MentionKind::numeric: return "numeric";
    case MentionKind::attribute: return "attribute";
    }
    return "value_exact";
}

std::vector<Mention> detect_entity_mentions(std::string_view sentence, const Table& table) {
    return detect(tokenize_with_spans(sentence), table, false);
}

bool has_value_mention(std::string_view text, const Table& table, CellRef ref) {
    const Cell* cell = table.find(ref);
    if (!cell || cell->is_header) return false;
    Table single;
    single.n_rows = table.n_rows;
    single.n_cols = table.n_cols;
    single.cells.push_back(*cell);
    return !detect(tokenize_with_spans(text), single, true).empty();
}

} // namespace ctrltab::corpus
