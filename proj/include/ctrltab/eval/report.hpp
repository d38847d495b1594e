#pragma once

#include "ctrltab/core/generation_io.hpp"
#include "ctrltab/core/types.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ctrltab::eval {

struct PairScore {
    std::string pair_id;
    double meteor = 0;
    double cell_recall = 0;
    /// Filled when an external scorer was used.
    std::optional<double> external;
};

struct ScoreReport {
    /// Corpus BLEU-4.
    double bleu = 0;
    /// Means over pairs.
    double meteor = 0;
    double cell_recall = 0;
    std::size_t n_pairs = 0;
    std::optional<std::string> external_metric;
    std::optional<double> external;
    /// Sorted by pair id.
    std::vector<PairScore> per_pair;
};

/// Scores outputs against the matching pairs' descriptions. Every output
/// must name a known pair (NotFoundError) with a non-empty description
/// (ValidationError), and each pair may be scored once.
ScoreReport score_outputs(const std::vector<GenerationRecord>& outputs, const std::vector<PairRecord>& pairs);

nlohmann::ordered_json to_json(const ScoreReport& report);

} // namespace ctrltab::eval
