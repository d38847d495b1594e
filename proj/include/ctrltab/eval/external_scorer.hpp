#pragma once

#include "ctrltab/util/http.hpp"

#include <string>
#include <vector>

namespace ctrltab::eval {

/// Adapter for learned metrics that are not computed natively (BERTScore,
/// BLEURT). Same transport contract as the LLM client: one POST
/// {metric, candidates, references}; the reply carries "scores", one per
/// candidate.
struct ExternalScorerConfig {
    std::string endpoint;
    std::string metric;
    util::HttpRetryOptions http{std::chrono::milliseconds(30000), 3, std::chrono::milliseconds(200),
                                "CTRLTAB_SCORER_KEY"};

    /// Reads CTRLTAB_SCORER_ENDPOINT over the default.
    static ExternalScorerConfig from_env(std::string metric);

    void validate() const;
};

/// Throws ValidationError on mismatched inputs and TransportError when the
/// reply lacks a numeric score per candidate.
std::vector<double> external_scores(const ExternalScorerConfig& cfg, const std::vector<std::string>& candidates,
                                    const std::vector<std::string>& references);

} // namespace ctrltab::eval
