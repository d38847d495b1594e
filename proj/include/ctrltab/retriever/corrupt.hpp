#pragma once

#include "ctrltab/core/vocabulary.hpp"
#include "ctrltab/util/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ctrltab::retriever {

struct CorruptedInput {
    std::vector<TokenId> token_ids;
    /// Sorted positions (in the original sequence) that were deleted.
    std::vector<std::size_t> deletion_positions;
};

/// Deletes round(noise_ratio * n) positions drawn uniformly without
/// replacement, always leaving at least one token. Empty input is returned
/// unchanged. Throws ConfigError unless noise_ratio lies in [0, 1).
CorruptedInput corrupt(std::span<const TokenId> tokens, double noise_ratio, util::CounterRng& rng);

} // namespace ctrltab::retriever
