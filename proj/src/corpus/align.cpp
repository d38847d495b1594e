#include "ctrltab/corpus/align.hpp"

#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/corpus/mentions.hpp"
#include "ctrltab/corpus/stopwords.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace ctrltab::corpus {
namespace {

std::unordered_set<std::string> table_vocabulary(const Table& table) {
    std::unordered_set<std::string> out;
    for (const auto& c : table.cells) {
        for (auto& t : tokenize(c.attribute)) out.insert(std::move(t));
        for (auto& t : tokenize(c.value)) out.insert(std::move(t));
    }
    for (auto& t : tokenize(table.caption)) out.insert(std::move(t));
    return out;
}

double score_against(const std::vector<std::string>& content,
                     const std::unordered_set<std::string>& vocab) {
    if (content.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& t : content) hit += vocab.count(t);
    return static_cast<double>(hit) / static_cast<double>(content.size());
}

std::vector<std::string> non_punct_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text)) {
        if (!is_punctuation_token(t)) out.push_back(std::move(t));
    }
    return out;
}

std::string normalized(std::string_view text) { return detokenize(non_punct_tokens(text)); }

double bag_f1(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0.0;
    std::map<std::string, std::size_t> counts;
    for (const auto& t : b) ++counts[t];
    std::size_t common = 0;
    for (const auto& t : a) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    // 2PR/(P+R) written over integers so boundary cases compare exactly.
    return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

} // namespace

std::vector<std::string> content_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& t : tokenize(text)) {
        if (is_punctuation_token(t) || is_stopword(t)) continue;
        if (seen.insert(t).second) out.push_back(std::move(t));
    }
    return out;
}

double overlap_score(std::string_view sentence, const Table& table) {
    return score_against(content_tokens(sentence), table_vocabulary(table));
}

std::vector<std::vector<KnowledgeSentence>> greedy_align_all(
    const std::vector<const Table*>& tables, const Article& article, const AlignOptions& opts) {
    std::vector<std::unordered_set<std::string>> vocabs;
    vocabs.reserve(tables.size());
    for (const Table* t : tables) vocabs.push_back(table_vocabulary(*t));

    struct Candidate {
        std::size_t sentence;
        double score;
    };
    std::vector<std::vector<Candidate>> per_table(tables.size());
    for (std::size_t s = 0; s < article.sentences.size(); ++s) {
        const auto& sentence = article.sentences[s];
        const auto content = content_tokens(sentence.text);
        std::size_t best = tables.size();
        double best_score = -1.0;
        for (std::size_t k = 0; k < tables.size(); ++k) {
            const double score = score_against(content, vocabs[k]);
            if (score < opts.theta_overlap || score <= best_score) continue;
            if (detect_entity_mentions(sentence.text, *tables[k]).empty()) continue;
            best = k;
            best_score = score;
        }
        if (best < tables.size()) per_table[best].push_back({s, best_score});
    }

    std::vector<std::vector<KnowledgeSentence>> out(tables.size());
    for (std::size_t k = 0; k < tables.size(); ++k) {
        auto& cands = per_table[k];
        std::stable_sort(cands.begin(), cands.end(),
                         [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
        for (const auto& c : cands) {
            if (out[k].size() >= opts.cap) break;
            const auto& sentence = article.sentences[c.sentence];
            KnowledgeSentence ks;
            ks.id = article.id + ":s" + std::to_string(sentence.index);
            ks.text = sentence.text;
            ks.status = KbStatus::automatic;
            ks.source_offset =
                std::make_pair(sentence.char_offset, sentence.char_offset + sentence.text.size());
            out[k].push_back(std::move(ks));
        }
    }
    return out;
}

std::vector<KnowledgeSentence> greedy_align(const Table& table, const Article& article,
                                            const AlignOptions& opts) {
    return greedy_align_all({&table}, article, opts).front();
}

double token_f1(std::string_view a, std::string_view b) {
    return bag_f1(non_punct_tokens(a), non_punct_tokens(b));
}

std::vector<KnowledgeSentence> dedup_against_description(
    const std::vector<KnowledgeSentence>& candidates, std::string_view description,
    double theta_dup) {
    std::vector<std::vector<std::string>> desc_sentences;
    for (const auto& [off, s] : split_sentences(description)) {
        desc_sentences.push_back(non_punct_tokens(s));
    }
    const std::string desc_norm = normalized(description);
    const std::string padded_desc = " " + desc_norm + " ";

    std::vector<KnowledgeSentence> out;
    for (const auto& cand : candidates) {
        const auto toks = non_punct_tokens(cand.text);
        bool duplicate = false;
        for (const auto& d : desc_sentences) {
            if (bag_f1(toks, d) >= theta_dup) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate && !toks.empty() && !desc_norm.empty()) {
            const std::string cand_norm = detokenize(toks);
            duplicate = padded_desc.find(" " + cand_norm + " ") != std::string::npos ||
                        (" " + cand_norm + " ").find(padded_desc) != std::string::npos;
        }
        if (!duplicate) out.push_back(cand);
    }
    return out;
}

HighlightSet auto_highlight(const Table& table, std::string_view description) {
    HighlightSet h;
    for (const auto& m : detect_entity_mentions(description, table)) {
        if (m.kind != MentionKind::attribute) h.refs.insert(m.cell_ref);
    }
    return h;
}

} // namespace ctrltab::corpus
