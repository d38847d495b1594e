#pragma once

#include "ctrltab/core/types.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ctrltab::corpus {

/// One annotator's decisions on one pair.
struct Annotation {
    std::string pair_id;
    HighlightSet highlights;
    /// sentence id -> keep. Sentences without a decision count as kept.
    std::map<std::string, bool> kb_keep;
};

struct AgreementReport {
    std::size_t n_samples = 0;
    double cell_agreement = 0;
    double kb_agreement = 0;
};

struct AgreementOptions {
    std::size_t sample_size = 100;
    std::uint64_t seed = 42;
};

/// Per-cell and per-sentence agreement between two annotators. Both lists
/// must cover the same pair ids (ValidationError otherwise). When more than
/// sample_size pairs are shared, a seeded random subset is scored. Fractions
/// are rounded to 3 decimals. Every cell of the table counts as one
/// decision; a pair's KB sentences count one decision each.
AgreementReport compute_agreement(const std::vector<Annotation>& a,
                                  const std::vector<Annotation>& b,
                                  std::span<const PairRecord> pairs,
                                  const AgreementOptions& opts = {});

} // namespace ctrltab::corpus
