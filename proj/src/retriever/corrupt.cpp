#include "ctrltab/retriever/corrupt.hpp"

#include "ctrltab/util/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctrltab::retriever {

CorruptedInput corrupt(std::span<const TokenId> tokens, double noise_ratio, util::CounterRng& rng) {
    if (!(noise_ratio >= 0.0 && noise_ratio < 1.0))
        throw ConfigError("noise_ratio must lie in [0, 1)");
    CorruptedInput out;
    const std::size_t n = tokens.size();
    if (n == 0) return out;

    std::size_t deletions = static_cast<std::size_t>(std::llround(noise_ratio * static_cast<double>(n)));
    deletions = std::min(deletions, n - 1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Partial Fisher-Yates: the first `deletions` slots are a uniform sample.
    for (std::size_t i = 0; i < deletions; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(order[i], order[j]);
    }
    out.deletion_positions.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(deletions));
    std::sort(out.deletion_positions.begin(), out.deletion_positions.end());

    out.token_ids.reserve(n - deletions);
    std::size_t d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d < deletions && out.deletion_positions[d] == i) {
            ++d;
            continue;
        }
        out.token_ids.push_back(tokens[i]);
    }
    return out;
}

} // namespace ctrltab::retriever
