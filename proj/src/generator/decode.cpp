#include "ctrltab/generator/decode.hpp"

#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctrltab::generator {
namespace {

bool selectable(TokenId id) {
    return id != special::kPad && id != special::kBos && id != special::kSepH && id != special::kSepT &&
           id != special::kSepB;
}

double penalized(double log_prob, std::size_t len, double p) {
    return log_prob / std::pow(static_cast<double>(std::max<std::size_t>(len, 1)), p);
}

/// Next-token log-probabilities given the encoder memory and a prefix.
class Stepper {
public:
    Stepper(const GeneratorModel& model, const LinearizedInput& input) : model_(model) {
        nn::Graph g(&model.params());
        const nn::Var mem = model.encode(g, input.token_ids);
        memory_ = g.value(mem);
    }

    std::vector<double> log_probs(const std::vector<TokenId>& prefix) const {
        nn::Graph g(&model_.params());
        std::vector<TokenId> in;
        in.reserve(prefix.size() + 1);
        in.push_back(special::kBos);
        in.insert(in.end(), prefix.begin(), prefix.end());
        const nn::Var logits = model_.decode_logits(g, g.constant(memory_), in);
        const auto v = g.value(logits);
        const auto last = v.row(v.rows() - 1);
        const double mx = last.maxCoeff();
        const double lse = mx + std::log((last.array() - mx).exp().sum());
        std::vector<double> out(static_cast<std::size_t>(last.size()));
        for (Eigen::Index i = 0; i < last.size(); ++i) out[static_cast<std::size_t>(i)] = last(i) - lse;
        return out;
    }

private:
    const GeneratorModel& model_;
    nn::Matrix memory_;
};

Hypothesis greedy(const Stepper& step, const GenerationConfig& cfg) {
    Hypothesis h;
    while (h.tokens.size() < cfg.max_output_len) {
        const auto lp = step.log_probs(h.tokens);
        TokenId best = -1;
        for (std::size_t i = 0; i < lp.size(); ++i) {
            const auto id = static_cast<TokenId>(i);
            if (selectable(id) && (best < 0 || lp[i] > lp[static_cast<std::size_t>(best)])) best = id;
        }
        h.tokens.push_back(best);
        h.log_prob += lp[static_cast<std::size_t>(best)];
        if (best == special::kEos) break;
    }
    h.score = penalized(h.log_prob, h.tokens.size(), cfg.length_penalty);
    return h;
}

bool better_by_log_prob(const Hypothesis& a, const Hypothesis& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.tokens < b.tokens;
}

bool better_by_score(const Hypothesis& a, const Hypothesis& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tokens < b.tokens;
}

Hypothesis beam(const Stepper& step, const GenerationConfig& cfg) {
    const std::size_t width = cfg.beam_width;
    std::vector<Hypothesis> live(1);
    std::vector<Hypothesis> finished;
    for (std::size_t len = 1; len <= cfg.max_output_len && !live.empty(); ++len) {
        std::vector<Hypothesis> candidates;
        for (const auto& h : live) {
            const auto lp = step.log_probs(h.tokens);
            std::vector<TokenId> ids;
            for (std::size_t i = 0; i < lp.size(); ++i)
                if (selectable(static_cast<TokenId>(i))) ids.push_back(static_cast<TokenId>(i));
            const std::size_t keep = std::min(width, ids.size());
            std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(keep), ids.end(),
                              [&](TokenId a, TokenId b) {
                                  const double la = lp[static_cast<std::size_t>(a)];
                                  const double lb = lp[static_cast<std::size_t>(b)];
                                  return la != lb ? la > lb : a < b;
                              });
            for (std::size_t k = 0; k < keep; ++k) {
                Hypothesis c = h;
                c.tokens.push_back(ids[k]);
                c.log_prob += lp[static_cast<std::size_t>(ids[k])];
                candidates.push_back(std::move(c));
            }
        }
        std::sort(candidates.begin(), candidates.end(), better_by_log_prob);
        live.clear();
        for (std::size_t k = 0; k < std::min(width, candidates.size()); ++k) {
            Hypothesis& c = candidates[k];
            c.score = penalized(c.log_prob, c.tokens.size(), cfg.length_penalty);
            if (c.tokens.back() == special::kEos || c.tokens.size() == cfg.max_output_len)
                finished.push_back(std::move(c));
            else
                live.push_back(std::move(c));
        }
    }
    finished.push_back(greedy(step, cfg));
    return *std::min_element(finished.begin(), finished.end(), better_by_score);
}

} // namespace

std::string to_string(DecodeStrategy s) { return s == DecodeStrategy::greedy ? "greedy" : "beam"; }

DecodeStrategy decode_strategy_from_string(std::string_view s) {
    if (s == "greedy") return DecodeStrategy::greedy;
    if (s == "beam") return DecodeStrategy::beam;
    throw ConfigError("unknown decode strategy '" + std::string(s) + "'");
}

void GenerationConfig::validate() const {
    if (beam_width < 1) throw ConfigError("beam_width must be at least 1");
    if (max_output_len < 1) throw ConfigError("max_output_len must be at least 1");
    if (!std::isfinite(length_penalty)) throw ConfigError("length_penalty must be finite");
}

Hypothesis decode(const GeneratorModel& model, const LinearizedInput& input, const GenerationConfig& cfg) {
    cfg.validate();
    const Stepper step(model, input);
    return cfg.strategy == DecodeStrategy::greedy ? greedy(step, cfg) : beam(step, cfg);
}

Hypothesis score_sequence(const GeneratorModel& model, const LinearizedInput& input,
                          const std::vector<TokenId>& tokens, double length_penalty) {
    const Stepper step(model, input);
    Hypothesis h;
    for (TokenId t : tokens) {
        const auto lp = step.log_probs(h.tokens);
        if (t < 0 || static_cast<std::size_t>(t) >= lp.size()) throw ValidationError("token id out of range");
        h.log_prob += lp[static_cast<std::size_t>(t)];
        h.tokens.push_back(t);
    }
    h.score = penalized(h.log_prob, h.tokens.size(), length_penalty);
    return h;
}

GenerationResult generate_description(const GeneratorModel& model, const KnowledgeSelector& selector,
                                      const PairRecord& pair, std::size_t n_kb,
                                      const GenerationConfig& cfg) {
    GenerationResult out;
    out.pair_id = pair.id;
    std::vector<KnowledgeSentence> selected;
    if (model.use_bkg() && !pair.kb.sentences.empty() && n_kb > 0) {
        if (!selector) throw ConfigError("generator uses background knowledge but no retriever was given");
        selected = select_sentences(pair, selector(pair, n_kb));
        for (const auto& s : selected) out.retrieved.push_back(s.id);
    }
    const LinearizedInput input = model.input_for(pair, selected);
    out.truncated = input.truncated;
    const Hypothesis h = decode(model, input, cfg);
    out.tokens = h.tokens;
    std::vector<TokenId> body = h.tokens;
    if (!body.empty() && body.back() == special::kEos) body.pop_back();
    out.text = detokenize(model.vocab().decode(body));
    return out;
}

std::vector<GenerationResult> generate_all(const GeneratorModel& model, const KnowledgeSelector& selector,
                                           const std::vector<PairRecord>& pairs, std::size_t n_kb,
                                           const GenerationConfig& cfg, unsigned threads) {
    std::vector<GenerationResult> out(pairs.size());
    util::parallel_for(pairs.size(), threads, [&](std::size_t i) {
        out[i] = generate_description(model, selector, pairs[i], n_kb, cfg);
    });
    return out;
}

} // namespace ctrltab::generator
