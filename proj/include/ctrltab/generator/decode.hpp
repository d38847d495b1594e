#pragma once

#include "ctrltab/core/linearize.hpp"
#include "ctrltab/generator/model.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::generator {

enum class DecodeStrategy { greedy, beam };

std::string to_string(DecodeStrategy s);
DecodeStrategy decode_strategy_from_string(std::string_view s);

struct GenerationConfig {
    DecodeStrategy strategy = DecodeStrategy::greedy;
    std::size_t beam_width = 4;
    std::size_t max_output_len = 64;
    double length_penalty = 1.0;

    void validate() const;
};

struct Hypothesis {
    /// Generated ids; ends in EOS unless the length cap was hit.
    std::vector<TokenId> tokens;
    double log_prob = 0;
    /// log_prob / len^length_penalty
    double score = 0;
};

/// Greedy: argmax (lowest id on ties) until EOS or the cap. Beam: keeps the
/// beam_width best prefixes by cumulative log-probability, ranks finished
/// hypotheses by the length-penalized score, and also scores the greedy
/// hypothesis so the result never falls below it. Pure in (model, input, cfg).
Hypothesis decode(const GeneratorModel& model, const LinearizedInput& input, const GenerationConfig& cfg);

/// Length-penalized score of a given continuation under the model.
Hypothesis score_sequence(const GeneratorModel& model, const LinearizedInput& input,
                          const std::vector<TokenId>& tokens, double length_penalty);

struct GenerationResult {
    std::string pair_id;
    std::string text;
    std::vector<TokenId> tokens;
    /// Provenance: ids of the knowledge sentences fed to the encoder.
    std::vector<std::string> retrieved;
    bool truncated = false;
};

/// Select knowledge (when the model uses it) -> linearize -> decode ->
/// detokenize. A use_bkg model without a selector is a ConfigError.
GenerationResult generate_description(const GeneratorModel& model, const KnowledgeSelector& selector,
                                      const PairRecord& pair, std::size_t n_kb,
                                      const GenerationConfig& cfg);

/// Runs generate_description over pairs on up to `threads` workers; results
/// come back in input order.
std::vector<GenerationResult> generate_all(const GeneratorModel& model, const KnowledgeSelector& selector,
                                           const std::vector<PairRecord>& pairs, std::size_t n_kb,
                                           const GenerationConfig& cfg, unsigned threads = 1);

} // namespace ctrltab::generator
