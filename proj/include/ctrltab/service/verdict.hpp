#pragma once

#include "ctrltab/core/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ctrltab::service {

/// One annotator's review of one pair. A later verdict by the same annotator
/// on the same pair supersedes the earlier one.
struct Verdict {
    std::string pair_id;
    std::string annotator_id;
    /// (sentence id, accept)
    std::vector<std::pair<std::string, bool>> kb_decisions;
    HighlightSet highlights;
    /// ISO-8601 UTC; stamped by the service when the client omits it.
    std::string timestamp;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

nlohmann::ordered_json to_json(const Verdict& v);

/// Throws ValidationError on a malformed body.
Verdict verdict_from_json(const nlohmann::json& j);

/// Checks that the verdict's sentences and cells exist in `pair`. Throws
/// ValidationError otherwise.
void validate_verdict(const Verdict& v, const PairRecord& pair);

std::string utc_timestamp_now();

} // namespace ctrltab::service
