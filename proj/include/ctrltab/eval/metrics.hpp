#pragma once

#include "ctrltab/core/types.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::eval {

using TokenSeq = std::vector<std::string>;

struct BleuDetail {
    double score = 0;
    /// Aggregate clipped precision for n = 1..4.
    std::array<double, 4> precisions{};
    double brevity_penalty = 1;
    std::size_t candidate_length = 0;
    std::size_t reference_length = 0;
};

/// Corpus BLEU-4 with one reference per candidate: clipped n-gram matches and
/// totals summed over the corpus, uniform weights, brevity penalty
/// exp(1 - r/c) when c < r, and 0 when any aggregate precision is 0. Throws
/// ValidationError on an empty corpus or mismatched list lengths.
BleuDetail bleu_detail(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references);
double bleu(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references);

struct MeteorDetail {
    double score = 0;
    std::size_t matches = 0;
    std::size_t chunks = 0;
    double precision = 0;
    double recall = 0;
};

/// METEOR over exact and Porter-stem unigram matches (no synonyms): the
/// alignment has the most matches and, among those, the fewest chunks.
/// Fmean = P*R / (0.9*P + 0.1*R), penalty = 0.5 * (chunks/matches)^3.
MeteorDetail meteor_detail(const TokenSeq& candidate, const TokenSeq& reference);
double meteor(const TokenSeq& candidate, const TokenSeq& reference);

/// Fraction of highlighted cells whose value is mentioned in `output`
/// (value_exact or numeric rules). 1.0 for an empty highlight set.
double cell_recall(std::string_view output, const HighlightSet& highlights, const Table& table);

} // namespace ctrltab::eval
