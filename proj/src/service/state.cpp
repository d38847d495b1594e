#include "ctrltab/service/state.hpp"

#include "ctrltab/util/error.hpp"

namespace ctrltab::service {
namespace {

corpus::Annotation to_annotation(const Verdict& v) {
    corpus::Annotation a;
    a.pair_id = v.pair_id;
    a.highlights = v.highlights;
    for (const auto& [id, accept] : v.kb_decisions) a.kb_keep[id] = accept;
    return a;
}

} // namespace

AnnotationState::AnnotationState(std::vector<PairRecord> dataset) : pairs_(std::move(dataset)) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (!index_.emplace(pairs_[i].id, i).second) throw ValidationError("duplicate pair id " + pairs_[i].id);
    }
}

const PairRecord& AnnotationState::pair(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw NotFoundError("unknown pair " + id);
    return pairs_[it->second];
}

void AnnotationState::check(const Verdict& v) const { validate_verdict(v, pair(v.pair_id)); }

void AnnotationState::apply(const Verdict& v, std::uint64_t seq) {
    verdicts_[v.pair_id][v.annotator_id] = ActiveVerdict{seq, v};
}

std::vector<std::string> AnnotationState::annotators(const std::string& pair_id) const {
    std::vector<std::string> out;
    if (auto it = verdicts_.find(pair_id); it != verdicts_.end())
        for (const auto& [name, _] : it->second) out.push_back(name);
    return out;
}

const ActiveVerdict* AnnotationState::verdict(const std::string& pair_id, const std::string& annotator) const {
    auto it = verdicts_.find(pair_id);
    if (it == verdicts_.end()) return nullptr;
    auto jt = it->second.find(annotator);
    return jt == it->second.end() ? nullptr : &jt->second;
}

PairRecord AnnotationState::annotator_view(const std::string& pair_id, const std::string& annotator) const {
    PairRecord p = pair(pair_id);
    const ActiveVerdict* av = verdict(pair_id, annotator);
    if (!av) return p;
    p.highlights = av->verdict.highlights;
    for (const auto& [id, accept] : av->verdict.kb_decisions) {
        for (auto& s : p.kb.sentences)
            if (s.id == id) s.status = accept ? KbStatus::accepted : KbStatus::rejected;
    }
    return p;
}

std::size_t AnnotationState::common_pairs(const std::string& a, const std::string& b) const {
    std::size_t n = 0;
    for (const auto& [pair_id, by] : verdicts_)
        if (by.count(a) && by.count(b)) ++n;
    return n;
}

corpus::AgreementReport AnnotationState::agreement(const std::string& a, const std::string& b,
                                                   const corpus::AgreementOptions& opts) const {
    std::vector<corpus::Annotation> va, vb;
    std::vector<PairRecord> common;
    for (const auto& [pair_id, by] : verdicts_) {
        auto ia = by.find(a), ib = by.find(b);
        if (ia == by.end() || ib == by.end()) continue;
        va.push_back(to_annotation(ia->second.verdict));
        vb.push_back(to_annotation(ib->second.verdict));
        common.push_back(pair(pair_id));
    }
    if (common.empty()) throw ValidationError("annotators " + a + " and " + b + " share no reviewed pairs");
    return corpus::compute_agreement(va, vb, common, opts);
}

std::vector<PairRecord> AnnotationState::export_pairs(const std::optional<std::string>& adjudicator,
                                                      bool verified_only) const {
    std::vector<PairRecord> out;
    for (const auto& p : pairs_) {
        auto it = verdicts_.find(p.id);
        if (it == verdicts_.end() || it->second.empty()) {
            if (!verified_only) out.push_back(p);
            continue;
        }
        const ActiveVerdict* chosen = nullptr;
        if (adjudicator) {
            if (auto jt = it->second.find(*adjudicator); jt != it->second.end()) chosen = &jt->second;
        }
        if (!chosen) {
            for (const auto& [_, av] : it->second)
                if (!chosen || av.seq > chosen->seq) chosen = &av;
        }
        PairRecord merged = p;
        merged.highlights = chosen->verdict.highlights;
        for (auto& s : merged.kb.sentences) {
            s.status = KbStatus::accepted;
            for (const auto& [id, accept] : chosen->verdict.kb_decisions)
                if (id == s.id) s.status = accept ? KbStatus::accepted : KbStatus::rejected;
        }
        out.push_back(std::move(merged));
    }
    return out;
}

} // namespace ctrltab::service
