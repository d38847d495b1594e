#include "ctrltab/core/stats.hpp"

#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/util/error.hpp"

namespace ctrltab {

CorpusStats corpus_stats(const std::vector<PairRecord>& dataset) {
    if (dataset.empty()) throw ValidationError("corpus_stats: empty dataset");
    double cells = 0;
    double highlighted = 0;
    double desc_tokens = 0;
    double kb = 0;
    for (const auto& p : dataset) {
        cells += static_cast<double>(p.table.cells.size());
        highlighted += static_cast<double>(p.highlights.size());
        desc_tokens += static_cast<double>(tokenize(p.description).size());
        kb += static_cast<double>(p.kb.size());
    }
    const double n = static_cast<double>(dataset.size());
    CorpusStats s;
    s.n_pairs = n;
    s.avg_cells = cells / n;
    s.avg_desc_tokens = desc_tokens / n;
    s.highlight_ratio = cells > 0 ? highlighted / cells : 0.0;
    s.avg_kb_sentences = kb / n;
    return s;
}

} // namespace ctrltab
