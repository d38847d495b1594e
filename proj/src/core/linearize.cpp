#include "ctrltab/core/linearize.hpp"

#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/log.hpp"

namespace ctrltab {
namespace {

void render_cell(const Cell& c, std::vector<std::string>& out) {
    for (auto& t : tokenize(c.attribute)) out.push_back(std::move(t));
    out.emplace_back(":");
    for (auto& t : tokenize(c.value)) out.push_back(std::move(t));
    out.emplace_back("|");
}

} // namespace

SegmentOrder segment_order_from_string(std::string_view s) {
    if (s == "HTB") return SegmentOrder::HTB;
    if (s == "BTH") return SegmentOrder::BTH;
    throw ConfigError("unknown segment order '" + std::string(s) + "'");
}

Segments render_segments(const Table& table, const HighlightSet& highlights,
                         const std::vector<std::string>& knowledge) {
    Segments seg;
    for (const Cell* c : table.row_major()) {
        render_cell(*c, seg.table);
        if (highlights.contains(c->ref())) render_cell(*c, seg.highlights);
    }
    for (const auto& sentence : knowledge) {
        for (auto& t : tokenize(sentence)) seg.knowledge.push_back(std::move(t));
        seg.knowledge.emplace_back("|");
    }
    return seg;
}

LinearizedInput assemble(const Segments& segments, SegmentOrder order,
                         const Vocabulary& vocab, std::optional<std::size_t> max_len) {
    std::size_t l_h = segments.highlights.size();
    std::size_t l_t = segments.table.size();
    std::size_t l_b = segments.knowledge.size();
    bool truncated = false;
    if (max_len) {
        const std::size_t budget = *max_len > 3 ? *max_len - 3 : 0;
        auto trim = [&](std::size_t& len) {
            const std::size_t total = l_h + l_t + l_b;
            if (total <= budget) return;
            const std::size_t cut = std::min(len, total - budget);
            len -= cut;
            truncated = truncated || cut > 0;
        };
        trim(l_b);
        trim(l_t);
        trim(l_h);
        if (truncated) {
            util::log_warning("input exceeds " + std::to_string(*max_len) +
                              " tokens; truncated knowledge/table segments");
        }
    }

    LinearizedInput out;
    out.l_h = l_h;
    out.l_t = l_t;
    out.l_b = l_b;
    out.truncated = truncated;
    out.token_ids.reserve(l_h + l_t + l_b + 3);
    auto emit = [&](TokenId sep, const std::vector<std::string>& toks, std::size_t n) {
        out.token_ids.push_back(sep);
        for (std::size_t i = 0; i < n; ++i) out.token_ids.push_back(vocab.id(toks[i]));
    };
    if (order == SegmentOrder::HTB) {
        emit(special::kSepH, segments.highlights, l_h);
        emit(special::kSepT, segments.table, l_t);
        emit(special::kSepB, segments.knowledge, l_b);
    } else {
        emit(special::kSepB, segments.knowledge, l_b);
        emit(special::kSepT, segments.table, l_t);
        emit(special::kSepH, segments.highlights, l_h);
    }
    return out;
}

LinearizedInput linearize(const Table& table, const HighlightSet& highlights,
                          const std::vector<KnowledgeSentence>& kb_selected,
                          SegmentOrder order, const Vocabulary& vocab,
                          std::optional<std::size_t> max_len) {
    std::vector<std::string> knowledge;
    knowledge.reserve(kb_selected.size());
    for (const auto& s : kb_selected) knowledge.push_back(s.text);
    return assemble(render_segments(table, highlights, knowledge), order, vocab, max_len);
}

} // namespace ctrltab
