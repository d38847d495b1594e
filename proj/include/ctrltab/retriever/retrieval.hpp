#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ctrltab::retriever {

struct RetrievalResult {
    std::string sentence_id;
    double score = 0;

    friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

/// Cosine similarity; 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

/// Sorts by descending score, ascending id on ties, and keeps the first n.
std::vector<RetrievalResult> top_n(std::vector<RetrievalResult> all, std::size_t n);

} // namespace ctrltab::retriever
