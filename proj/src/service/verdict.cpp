#include "ctrltab/service/verdict.hpp"

#include "ctrltab/util/error.hpp"

#include <chrono>
#include <ctime>
#include <set>

namespace ctrltab::service {

nlohmann::ordered_json to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["pair_id"] = v.pair_id;
    j["annotator_id"] = v.annotator_id;
    auto& kb = j["kb_decisions"] = nlohmann::ordered_json::array();
    for (const auto& [id, accept] : v.kb_decisions) kb.push_back({{"sentence_id", id}, {"accept", accept}});
    auto& h = j["highlights"] = nlohmann::ordered_json::array();
    for (const auto& r : v.highlights.refs) h.push_back({r.row, r.col});
    j["timestamp"] = v.timestamp;
    return j;
}

Verdict verdict_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("verdict must be a JSON object");
    Verdict v;
    try {
        if (auto it = j.find("pair_id"); it != j.end()) v.pair_id = it->get<std::string>();
        v.annotator_id = j.at("annotator_id").get<std::string>();
        if (auto it = j.find("kb_decisions"); it != j.end()) {
            for (const auto& d : *it) v.kb_decisions.emplace_back(d.at("sentence_id").get<std::string>(), d.at("accept").get<bool>());
        }
        if (auto it = j.find("highlights"); it != j.end()) {
            for (const auto& h : *it) {
                if (!h.is_array() || h.size() != 2) throw ValidationError("highlight must be [row, col]");
                v.highlights.refs.insert({h[0].get<int>(), h[1].get<int>()});
            }
        }
        if (auto it = j.find("timestamp"); it != j.end() && !it->is_null()) v.timestamp = it->get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed verdict: ") + e.what());
    }
    if (v.annotator_id.empty()) throw ValidationError("annotator_id must not be empty");
    return v;
}

void validate_verdict(const Verdict& v, const PairRecord& pair) {
    std::set<std::string> seen;
    for (const auto& [id, _] : v.kb_decisions) {
        if (!pair.kb.find(id)) throw ValidationError("pair " + pair.id + " has no knowledge sentence " + id);
        if (!seen.insert(id).second) throw ValidationError("sentence " + id + " decided twice");
    }
    for (const auto& r : v.highlights.refs) {
        if (!pair.table.find(r))
            throw ValidationError("pair " + pair.id + " has no cell (" + std::to_string(r.row) + "," +
                                  std::to_string(r.col) + ")");
    }
}

std::string utc_timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace ctrltab::service
