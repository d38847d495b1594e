#include "ctrltab/retriever/tfidf.hpp"

#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/util/error.hpp"

#include <cmath>
#include <set>

namespace ctrltab::retriever {
namespace {

std::map<std::string, std::size_t> term_counts(const std::vector<std::string>& tokens) {
    std::map<std::string, std::size_t> tf;
    for (const auto& t : tokens) {
        if (is_punctuation_token(t)) continue;
        ++tf[t];
    }
    return tf;
}

double norm(const std::map<std::string, double>& v) {
    double s = 0;
    for (const auto& [_, w] : v) s += w * w;
    return std::sqrt(s);
}

} // namespace

TfidfIndex TfidfIndex::build(const std::vector<std::pair<std::string, std::vector<std::string>>>& docs) {
    if (docs.empty()) throw ValidationError("tf-idf index needs at least one document");
    TfidfIndex index;
    std::vector<std::map<std::string, std::size_t>> counts;
    counts.reserve(docs.size());
    for (const auto& [id, tokens] : docs) {
        index.ids_.push_back(id);
        counts.push_back(term_counts(tokens));
        for (const auto& [term, _] : counts.back()) ++index.df_[term];
    }
    for (const auto& tf : counts) {
        std::map<std::string, double> v;
        const double D = static_cast<double>(index.ids_.size());
        for (const auto& [term, n] : tf) {
            const double idf = std::log((1.0 + D) / (1.0 + static_cast<double>(index.df_.at(term))));
            v[term] = static_cast<double>(n) * idf + static_cast<double>(n);
        }
        index.norms_.push_back(norm(v));
        index.vectors_.push_back(std::move(v));
    }
    return index;
}

std::size_t TfidfIndex::document_frequency(const std::string& term) const {
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

std::map<std::string, double> TfidfIndex::weigh(const std::vector<std::string>& tokens) const {
    std::map<std::string, double> v;
    const double D = static_cast<double>(ids_.size());
    for (const auto& [term, n] : term_counts(tokens)) {
        const double idf = std::log((1.0 + D) / (1.0 + static_cast<double>(document_frequency(term))));
        v[term] = static_cast<double>(n) * idf + static_cast<double>(n);
    }
    return v;
}

std::vector<RetrievalResult> TfidfIndex::query(const std::vector<std::string>& tokens, std::size_t n) const {
    const auto q = weigh(tokens);
    const double qn = norm(q);
    std::vector<RetrievalResult> all;
    all.reserve(ids_.size());
    for (std::size_t d = 0; d < ids_.size(); ++d) {
        double score = 0;
        if (qn > 0 && norms_[d] > 0) {
            double dot = 0;
            const auto& doc = vectors_[d];
            for (const auto& [term, w] : q) {
                auto it = doc.find(term);
                if (it != doc.end()) dot += w * it->second;
            }
            score = std::min(1.0, dot / (qn * norms_[d]));
        }
        all.push_back({ids_[d], score});
    }
    return top_n(std::move(all), n);
}

std::vector<RetrievalResult> tfidf_retrieve(const TfidfIndex& index,
                                            const std::vector<std::string>& query_tokens,
                                            std::size_t n) {
    return index.query(query_tokens, n);
}

} // namespace ctrltab::retriever
