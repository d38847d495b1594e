#include "ctrltab/eval/external_scorer.hpp"

#include "ctrltab/util/error.hpp"

#include <cstdlib>

namespace ctrltab::eval {

ExternalScorerConfig ExternalScorerConfig::from_env(std::string metric) {
    ExternalScorerConfig cfg;
    cfg.metric = std::move(metric);
    if (const char* e = std::getenv("CTRLTAB_SCORER_ENDPOINT")) cfg.endpoint = e;
    return cfg;
}

void ExternalScorerConfig::validate() const {
    if (endpoint.empty()) throw ConfigError("scorer endpoint is not set (CTRLTAB_SCORER_ENDPOINT)");
    util::check_endpoint(endpoint);
    if (metric.empty()) throw ConfigError("scorer metric name is empty");
    if (http.timeout.count() <= 0) throw ConfigError("scorer timeout must be positive");
}

std::vector<double> external_scores(const ExternalScorerConfig& cfg, const std::vector<std::string>& candidates,
                                    const std::vector<std::string>& references) {
    cfg.validate();
    if (candidates.size() != references.size())
        throw ValidationError("candidates and references differ in length");
    if (candidates.empty()) return {};
    const auto reply = util::post_json_with_retries(
        cfg.endpoint, nlohmann::json{{"metric", cfg.metric}, {"candidates", candidates}, {"references", references}},
        cfg.http, "scorer " + cfg.metric);
    const auto& body = reply.body;
    if (!body.is_object() || !body.contains("scores") || !body["scores"].is_array() ||
        body["scores"].size() != candidates.size())
        throw TransportError("scorer reply has no \"scores\" array of the expected length");
    std::vector<double> out;
    for (const auto& s : body["scores"]) {
        if (!s.is_number()) throw TransportError("scorer reply contains a non-numeric score");
        out.push_back(s.get<double>());
    }
    return out;
}

} // namespace ctrltab::eval
