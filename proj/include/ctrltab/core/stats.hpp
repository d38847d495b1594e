#pragma once

#include "ctrltab/core/types.hpp"

#include <cstddef>
#include <vector>

namespace ctrltab {

struct CorpusStats {
    double n_pairs = 0;
    double avg_cells = 0;
    double avg_desc_tokens = 0;
    /// Total highlighted cells over total cells.
    double highlight_ratio = 0;
    double avg_kb_sentences = 0;
};

/// Throws ValidationError on an empty dataset.
CorpusStats corpus_stats(const std::vector<PairRecord>& dataset);

} // namespace ctrltab
