#include "ctrltab/generator/model.hpp"

#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/nn/layers.hpp"
#include "ctrltab/retriever/model.hpp"
#include "ctrltab/retriever/tfidf.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/log.hpp"

#include <algorithm>

namespace ctrltab::generator {
namespace {

std::string enc_name(std::size_t i) { return "enc" + std::to_string(i); }
std::string dec_name(std::size_t i) { return "dec" + std::to_string(i); }

} // namespace

KnowledgeSelector neural_selector(const retriever::RetrieverModel& model) {
    return [&model](const PairRecord& pair, std::size_t n) { return model.retrieve_topn(pair, n); };
}

KnowledgeSelector tfidf_selector() {
    return [](const PairRecord& pair, std::size_t n) -> std::vector<retriever::RetrievalResult> {
        std::vector<std::pair<std::string, std::vector<std::string>>> docs;
        for (const auto& s : pair.kb.sentences)
            if (s.status != KbStatus::rejected) docs.emplace_back(s.id, tokenize(s.text));
        if (docs.empty()) return {};
        const auto index = retriever::TfidfIndex::build(docs);
        Segments seg = render_segments(pair.table, pair.highlights, {});
        seg.table.insert(seg.table.end(), seg.highlights.begin(), seg.highlights.end());
        return retriever::tfidf_retrieve(index, seg.table, n);
    };
}

GeneratorModel::GeneratorModel(Vocabulary vocab, nn::ModelConfig cfg, std::uint64_t seed, bool use_bkg,
                               std::size_t n_kb)
    : vocab_(std::move(vocab)), cfg_(cfg), params_(seed), use_bkg_(use_bkg), n_kb_(n_kb) {
    if (cfg_.vocab_size == 0) cfg_.vocab_size = vocab_.size();
    if (cfg_.vocab_size != vocab_.size())
        throw ConfigError("generator vocab_size does not match the vocabulary");
    cfg_.validate();
    nn::add_embedding_params(params_, cfg_);
    for (std::size_t i = 0; i < cfg_.n_layers_enc; ++i) nn::add_encoder_layer_params(params_, enc_name(i), cfg_);
    nn::add_layer_norm_params(params_, "enc_ln", cfg_);
    for (std::size_t i = 0; i < cfg_.n_layers_dec; ++i) nn::add_decoder_layer_params(params_, dec_name(i), cfg_);
    nn::add_layer_norm_params(params_, "dec_ln", cfg_);
}

GeneratorModel GeneratorModel::from_checkpoint(nn::Checkpoint ckpt) {
    if (ckpt.model_kind != kModelKind)
        throw ValidationError("checkpoint holds a '" + ckpt.model_kind + "' model, not a generator");
    GeneratorModel m(ckpt.vocab, ckpt.config, ckpt.params.seed(), ckpt.extra.value("use_bkg", true),
                     ckpt.extra.value("n_kb", kDefaultNKb));
    for (std::size_t i = 0; i < m.params_.size(); ++i) {
        const auto& name = m.params_.name(i);
        if (!ckpt.params.contains(name)) throw ValidationError("checkpoint is missing tensor " + name);
        const auto& src = ckpt.params.at(name);
        if (src.shape != m.params_.at(i).shape)
            throw ValidationError("checkpoint tensor " + name + " has the wrong shape");
        m.params_.at(i) = src;
    }
    return m;
}

nn::Checkpoint GeneratorModel::to_checkpoint() const {
    nn::Checkpoint ck;
    ck.model_kind = std::string(kModelKind);
    ck.config = cfg_;
    ck.vocab = vocab_;
    ck.params = params_;
    ck.extra = {{"use_bkg", use_bkg_}, {"n_kb", n_kb_}};
    return ck;
}

LinearizedInput GeneratorModel::input_for(const PairRecord& pair,
                                          const std::vector<KnowledgeSentence>& selected) const {
    if (!use_bkg_) return linearize(pair.table, pair.highlights, {}, SegmentOrder::HTB, vocab_, cfg_.max_input_len);
    return linearize(pair.table, pair.highlights, selected, SegmentOrder::HTB, vocab_, cfg_.max_input_len);
}

std::vector<TokenId> GeneratorModel::target_for(const std::string& description) const {
    std::vector<TokenId> ids = vocab_.encode(tokenize(description));
    if (ids.size() + 1 > cfg_.max_output_len) ids.resize(cfg_.max_output_len - 1);
    ids.push_back(special::kEos);
    return ids;
}

nn::Var GeneratorModel::encode(nn::Graph& g, const std::vector<TokenId>& input_ids) const {
    nn::Var x = nn::embed_tokens(g, input_ids, cfg_);
    for (std::size_t i = 0; i < cfg_.n_layers_enc; ++i) x = nn::encoder_layer(g, enc_name(i), x, cfg_);
    return nn::layer_norm(g, "enc_ln", x);
}

nn::Var GeneratorModel::decode_logits(nn::Graph& g, nn::Var memory,
                                      const std::vector<TokenId>& decoder_input) const {
    nn::Var h = nn::embed_tokens(g, decoder_input, cfg_);
    for (std::size_t i = 0; i < cfg_.n_layers_dec; ++i) h = nn::decoder_layer(g, dec_name(i), h, memory, cfg_);
    h = nn::layer_norm(g, "dec_ln", h);
    return nn::tied_logits(g, h);
}

nn::Var GeneratorModel::teacher_forced_loss(nn::Graph& g, const std::vector<TokenId>& input_ids,
                                            const std::vector<TokenId>& target) const {
    if (target.empty()) throw ValidationError("generator target is empty");
    std::vector<TokenId> dec_in;
    dec_in.reserve(target.size());
    dec_in.push_back(special::kBos);
    dec_in.insert(dec_in.end(), target.begin(), target.end() - 1);
    const nn::Var memory = encode(g, input_ids);
    return g.cross_entropy(decode_logits(g, memory, dec_in), target);
}

std::vector<KnowledgeSentence> select_sentences(const PairRecord& pair,
                                                const std::vector<retriever::RetrievalResult>& results) {
    std::vector<KnowledgeSentence> out;
    for (const auto& r : results) {
        const KnowledgeSentence* s = pair.kb.find(r.sentence_id);
        if (!s) throw NotFoundError("pair " + pair.id + " has no sentence " + r.sentence_id);
        out.push_back(*s);
    }
    return out;
}

GeneratorModel train_generator(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                               const KnowledgeSelector& selector,
                               std::size_t n_kb, nn::ModelConfig model_cfg, const nn::TrainConfig& train_cfg,
                               bool use_bkg, const GeneratorTrainOptions& opts, nn::TrainStats* stats) {
    train_cfg.validate();
    if (use_bkg && !selector) throw ConfigError("use_bkg needs a trained retriever");
    if (use_bkg && n_kb == 0) throw ConfigError("n_kb must be at least 1");

    std::vector<const PairRecord*> usable;
    for (const auto& p : pairs)
        if (!p.description.empty()) usable.push_back(&p);
    if (usable.empty()) throw ValidationError("no training pairs with a description");

    GeneratorModel model(vocab, model_cfg, train_cfg.seed, use_bkg, n_kb);
    std::vector<std::vector<TokenId>> inputs, targets;
    inputs.reserve(usable.size());
    targets.reserve(usable.size());
    std::size_t truncated = 0;
    for (const PairRecord* p : usable) {
        std::vector<KnowledgeSentence> selected;
        if (use_bkg && !p->kb.sentences.empty()) selected = select_sentences(*p, selector(*p, n_kb));
        LinearizedInput in = model.input_for(*p, selected);
        truncated += in.truncated ? 1 : 0;
        inputs.push_back(std::move(in.token_ids));
        targets.push_back(model.target_for(p->description));
    }
    if (truncated > 0) util::log_warning(std::to_string(truncated) + " generator inputs were truncated");

    const nn::ExampleLoss loss = [&](nn::Graph& g, std::size_t i, std::size_t) {
        return model.teacher_forced_loss(g, inputs[i], targets[i]);
    };
    nn::TrainStats s = nn::train(model.params(), inputs.size(), loss, train_cfg, opts.threads, opts.on_epoch);
    util::log_info("generator trained on " + std::to_string(inputs.size()) + " pairs, final loss " +
                   (s.epoch_losses.empty() ? std::string("n/a") : std::to_string(s.epoch_losses.back())));
    if (stats) *stats = std::move(s);
    return model;
}

nn::ModelConfig default_generator_config(std::size_t vocab_size) {
    nn::ModelConfig cfg;
    cfg.d_model = 128;
    cfg.n_heads = 4;
    cfg.n_layers_enc = 2;
    cfg.n_layers_dec = 2;
    cfg.max_input_len = 512;
    cfg.max_output_len = 64;
    cfg.vocab_size = vocab_size;
    return cfg;
}

} // namespace ctrltab::generator
