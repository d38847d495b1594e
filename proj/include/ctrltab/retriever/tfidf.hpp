#pragma once

#include "ctrltab/retriever/retrieval.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ctrltab::retriever {

/// Sparse TF-IDF index over sentences. Term weight is
/// tf * ln((1 + D) / (1 + df)) + tf, so terms present in every document
/// still count. Punctuation tokens are ignored.
class TfidfIndex {
public:
    /// Documents are (sentence id, tokens).
    static TfidfIndex build(const std::vector<std::pair<std::string, std::vector<std::string>>>& docs);

    std::size_t corpus_size() const { return ids_.size(); }
    std::size_t document_frequency(const std::string& term) const;

    /// Weighted term vector for arbitrary tokens under this index's df.
    std::map<std::string, double> weigh(const std::vector<std::string>& tokens) const;

    /// Cosine of the query vector against every document, top `n` by score
    /// with id tie-break. An empty query scores 0 everywhere and so returns
    /// the first n ids.
    std::vector<RetrievalResult> query(const std::vector<std::string>& tokens, std::size_t n) const;

private:
    std::map<std::string, std::size_t> df_;
    std::vector<std::string> ids_;
    std::vector<std::map<std::string, double>> vectors_;
    std::vector<double> norms_;
};

std::vector<RetrievalResult> tfidf_retrieve(const TfidfIndex& index,
                                            const std::vector<std::string>& query_tokens,
                                            std::size_t n);

} // namespace ctrltab::retriever
