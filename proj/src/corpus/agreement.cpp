#include "ctrltab/corpus/agreement.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ctrltab::corpus {
namespace {

std::map<std::string, const Annotation*> index_by_pair(const std::vector<Annotation>& list,
                                                       const char* who) {
    std::map<std::string, const Annotation*> out;
    for (const auto& a : list) {
        if (!out.emplace(a.pair_id, &a).second)
            throw ValidationError(std::string("agreement: annotator ") + who +
                                  " has two annotations for pair '" + a.pair_id + "'");
    }
    return out;
}

bool keeps(const Annotation& a, const std::string& sentence_id) {
    auto it = a.kb_keep.find(sentence_id);
    return it == a.kb_keep.end() || it->second;
}

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

} // namespace

AgreementReport compute_agreement(const std::vector<Annotation>& a,
                                  const std::vector<Annotation>& b,
                                  std::span<const PairRecord> pairs,
                                  const AgreementOptions& opts) {
    const auto ia = index_by_pair(a, "a");
    const auto ib = index_by_pair(b, "b");
    std::vector<std::string> ids;
    for (const auto& [id, ann] : ia) {
        if (!ib.count(id)) throw ValidationError("agreement: pair '" + id + "' missing from b");
        ids.push_back(id);
    }
    for (const auto& [id, ann] : ib) {
        if (!ia.count(id)) throw ValidationError("agreement: pair '" + id + "' missing from a");
    }
    if (ids.size() > opts.sample_size) {
        util::CounterRng rng(util::derive_seed(opts.seed, "agreement-sample"));
        rng.shuffle(ids);
        ids.resize(opts.sample_size);
        std::sort(ids.begin(), ids.end());
    }

    std::map<std::string, const PairRecord*> by_id;
    for (const auto& p : pairs) by_id.emplace(p.id, &p);

    std::size_t cell_total = 0, cell_same = 0, kb_total = 0, kb_same = 0;
    for (const auto& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw NotFoundError("agreement: unknown pair '" + id + "'");
        const PairRecord& pair = *it->second;
        const Annotation& x = *ia.at(id);
        const Annotation& y = *ib.at(id);
        for (const auto& cell : pair.table.cells) {
            ++cell_total;
            if (x.highlights.contains(cell.ref()) == y.highlights.contains(cell.ref())) ++cell_same;
        }
        for (const auto& s : pair.kb.sentences) {
            ++kb_total;
            if (keeps(x, s.id) == keeps(y, s.id)) ++kb_same;
        }
    }

    AgreementReport r;
    r.n_samples = ids.size();
    r.cell_agreement =
        cell_total ? round3(static_cast<double>(cell_same) / static_cast<double>(cell_total)) : 1.0;
    r.kb_agreement =
        kb_total ? round3(static_cast<double>(kb_same) / static_cast<double>(kb_total)) : 1.0;
    return r;
}

} // namespace ctrltab::corpus
