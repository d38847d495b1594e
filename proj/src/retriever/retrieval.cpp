#include "ctrltab/retriever/retrieval.hpp"

#include "ctrltab/util/error.hpp"

#include <algorithm>
#include <cmath>

namespace ctrltab::retriever {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("cosine: vector sizes differ");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<RetrievalResult> top_n(std::vector<RetrievalResult> all, std::size_t n) {
    std::sort(all.begin(), all.end(), [](const RetrievalResult& x, const RetrievalResult& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.sentence_id < y.sentence_id;
    });
    if (all.size() > n) all.resize(n);
    return all;
}

} // namespace ctrltab::retriever
