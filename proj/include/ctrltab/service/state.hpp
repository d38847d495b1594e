#pragma once

#include "ctrltab/core/types.hpp"
#include "ctrltab/corpus/agreement.hpp"
#include "ctrltab/service/verdict.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ctrltab::service {

struct ActiveVerdict {
    std::uint64_t seq = 0;
    Verdict verdict;
};

/// Dataset plus the active verdict of every (pair, annotator). Not
/// synchronized; the service wraps it in a reader/writer lock.
class AnnotationState {
public:
    explicit AnnotationState(std::vector<PairRecord> dataset);

    const std::vector<PairRecord>& pairs() const { return pairs_; }
    /// NotFoundError for an unknown id.
    const PairRecord& pair(const std::string& id) const;

    /// NotFoundError for an unknown pair, ValidationError for bad refs.
    void check(const Verdict& v) const;
    /// Supersedes any earlier verdict by the same annotator on the pair.
    void apply(const Verdict& v, std::uint64_t seq);

    /// Annotators with a verdict on `pair_id`, sorted.
    std::vector<std::string> annotators(const std::string& pair_id) const;
    const ActiveVerdict* verdict(const std::string& pair_id, const std::string& annotator) const;

    /// The pair as `annotator` sees it: their highlights and KB decisions
    /// over the automatic annotation. Undecided sentences keep their status.
    PairRecord annotator_view(const std::string& pair_id, const std::string& annotator) const;

    /// Agreement over the pairs both annotators reviewed. Throws
    /// ValidationError when they share none.
    corpus::AgreementReport agreement(const std::string& a, const std::string& b,
                                      const corpus::AgreementOptions& opts = {}) const;
    std::size_t common_pairs(const std::string& a, const std::string& b) const;

    /// Merged dataset. A reviewed pair takes the adjudicator's verdict when
    /// they gave one, else the latest verdict; its KB statuses become
    /// accepted or rejected (undecided sentences count as accepted).
    std::vector<PairRecord> export_pairs(const std::optional<std::string>& adjudicator, bool verified_only) const;

private:
    std::vector<PairRecord> pairs_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::map<std::string, ActiveVerdict>> verdicts_;
};

} // namespace ctrltab::service
