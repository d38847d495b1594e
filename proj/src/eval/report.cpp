#include "ctrltab/eval/report.hpp"

#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/eval/metrics.hpp"
#include "ctrltab/util/error.hpp"

#include <algorithm>
#include <map>

namespace ctrltab::eval {

ScoreReport score_outputs(const std::vector<GenerationRecord>& outputs, const std::vector<PairRecord>& pairs) {
    std::map<std::string, const PairRecord*> by_id;
    for (const auto& p : pairs) by_id[p.id] = &p;

    std::vector<const GenerationRecord*> sorted;
    for (const auto& o : outputs) sorted.push_back(&o);
    std::sort(sorted.begin(), sorted.end(),
              [](const GenerationRecord* a, const GenerationRecord* b) { return a->pair_id < b->pair_id; });

    ScoreReport report;
    std::vector<TokenSeq> cands, refs;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const GenerationRecord& o = *sorted[i];
        if (i > 0 && sorted[i - 1]->pair_id == o.pair_id)
            throw ValidationError("pair " + o.pair_id + " has more than one output");
        auto it = by_id.find(o.pair_id);
        if (it == by_id.end()) throw NotFoundError("output for unknown pair " + o.pair_id);
        const PairRecord& p = *it->second;
        if (p.description.empty()) throw ValidationError("pair " + p.id + " has no reference description");
        cands.push_back(tokenize(o.output));
        refs.push_back(tokenize(p.description));
        PairScore s;
        s.pair_id = o.pair_id;
        s.meteor = meteor(cands.back(), refs.back());
        s.cell_recall = cell_recall(o.output, p.highlights, p.table);
        report.meteor += s.meteor;
        report.cell_recall += s.cell_recall;
        report.per_pair.push_back(std::move(s));
    }
    report.n_pairs = report.per_pair.size();
    report.bleu = bleu(cands, refs);
    report.meteor /= static_cast<double>(report.n_pairs);
    report.cell_recall /= static_cast<double>(report.n_pairs);
    return report;
}

nlohmann::ordered_json to_json(const ScoreReport& report) {
    nlohmann::ordered_json j;
    j["n_pairs"] = report.n_pairs;
    j["bleu"] = report.bleu;
    j["meteor"] = report.meteor;
    j["cell_recall"] = report.cell_recall;
    if (report.external_metric) {
        j["external_metric"] = *report.external_metric;
        j["external"] = report.external.value_or(0.0);
    }
    auto& rows = j["per_pair"] = nlohmann::ordered_json::array();
    for (const auto& s : report.per_pair) {
        nlohmann::ordered_json r;
        r["pair_id"] = s.pair_id;
        r["meteor"] = s.meteor;
        r["cell_recall"] = s.cell_recall;
        if (s.external) r["external"] = *s.external;
        rows.push_back(std::move(r));
    }
    return j;
}

} // namespace ctrltab::eval
