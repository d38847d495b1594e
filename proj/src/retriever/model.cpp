#include "ctrltab/retriever/model.hpp"

#include "ctrltab/core/linearize.hpp"
#include "ctrltab/core/tokenize.hpp"
#include "ctrltab/nn/layers.hpp"
#include "ctrltab/retriever/corrupt.hpp"
#include "ctrltab/util/error.hpp"
#include "ctrltab/util/log.hpp"
#include "ctrltab/util/rng.hpp"

#include <algorithm>

namespace ctrltab::retriever {
namespace {

std::string enc_name(std::size_t i) { return "enc" + std::to_string(i); }
std::string dec_name(std::size_t i) { return "dec" + std::to_string(i); }

void add_params(nn::ParameterSet& p, const nn::ModelConfig& cfg) {
    nn::add_embedding_params(p, cfg);
    for (std::size_t i = 0; i < cfg.n_layers_enc; ++i) nn::add_encoder_layer_params(p, enc_name(i), cfg);
    nn::add_layer_norm_params(p, "enc_ln", cfg);
    for (std::size_t i = 0; i < cfg.n_layers_dec; ++i) nn::add_decoder_layer_params(p, dec_name(i), cfg);
    nn::add_layer_norm_params(p, "dec_ln", cfg);
}

} // namespace

RetrieverModel::RetrieverModel(Vocabulary vocab, nn::ModelConfig cfg, std::uint64_t seed)
    : vocab_(std::move(vocab)), cfg_(cfg), params_(seed) {
    if (cfg_.vocab_size == 0) cfg_.vocab_size = vocab_.size();
    if (cfg_.vocab_size != vocab_.size())
        throw ConfigError("retriever vocab_size does not match the vocabulary");
    cfg_.validate();
    add_params(params_, cfg_);
}

RetrieverModel RetrieverModel::from_checkpoint(nn::Checkpoint ckpt) {
    if (ckpt.model_kind != kModelKind)
        throw ValidationError("checkpoint holds a '" + ckpt.model_kind + "' model, not a retriever");
    RetrieverModel m(ckpt.vocab, ckpt.config, ckpt.params.seed());
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

nn::Checkpoint RetrieverModel::to_checkpoint() const {
    nn::Checkpoint ck;
    ck.model_kind = std::string(kModelKind);
    ck.config = cfg_;
    ck.vocab = vocab_;
    ck.params = params_;
    return ck;
}

SegmentIds RetrieverModel::segments(const std::string& sentence, const Table& table,
                                    const HighlightSet& highlights) const {
    std::vector<std::string> kb;
    if (!sentence.empty()) kb.push_back(sentence);
    const Segments seg = render_segments(table, highlights, kb);
    const LinearizedInput lin = assemble(seg, SegmentOrder::BTH, vocab_, cfg_.max_input_len);
    // BTH layout: SEP_B b SEP_T t SEP_H h.
    SegmentIds out;
    auto at = lin.token_ids.begin();
    out.knowledge.assign(at + 1, at + 1 + static_cast<std::ptrdiff_t>(lin.l_b));
    at += 1 + static_cast<std::ptrdiff_t>(lin.l_b);
    out.table.assign(at + 1, at + 1 + static_cast<std::ptrdiff_t>(lin.l_t));
    at += 1 + static_cast<std::ptrdiff_t>(lin.l_t);
    out.highlights.assign(at + 1, at + 1 + static_cast<std::ptrdiff_t>(lin.l_h));
    return out;
}

std::vector<TokenId> RetrieverModel::encoder_input(const std::vector<TokenId>& knowledge,
                                                   const SegmentIds& seg) {
    std::vector<TokenId> ids;
    ids.reserve(knowledge.size() + seg.table.size() + seg.highlights.size() + 3);
    ids.push_back(special::kSepB);
    ids.insert(ids.end(), knowledge.begin(), knowledge.end());
    ids.push_back(special::kSepT);
    ids.insert(ids.end(), seg.table.begin(), seg.table.end());
    ids.push_back(special::kSepH);
    ids.insert(ids.end(), seg.highlights.begin(), seg.highlights.end());
    return ids;
}

nn::Var RetrieverModel::encode(nn::Graph& g, const std::vector<TokenId>& input_ids) const {
    nn::Var x = nn::embed_tokens(g, input_ids, cfg_);
    for (std::size_t i = 0; i < cfg_.n_layers_enc; ++i) x = nn::encoder_layer(g, enc_name(i), x, cfg_);
    x = nn::layer_norm(g, "enc_ln", x);
    return g.mean_rows(x);
}

nn::Var RetrieverModel::reconstruction_loss(nn::Graph& g, const SegmentIds& clean,
                                            const std::vector<TokenId>& corrupted_knowledge,
                                            ReconstructionTrace* trace) const {
    const auto input = encoder_input(corrupted_knowledge, clean);
    const nn::Var memory = encode(g, input);

    std::vector<TokenId> target;
    target.reserve(clean.knowledge.size() + clean.table.size() + clean.highlights.size());
    target.insert(target.end(), clean.knowledge.begin(), clean.knowledge.end());
    target.insert(target.end(), clean.table.begin(), clean.table.end());
    target.insert(target.end(), clean.highlights.begin(), clean.highlights.end());
    if (target.empty()) throw ValidationError("reconstruction target is empty");

    std::vector<TokenId> dec_in;
    dec_in.reserve(target.size());
    dec_in.push_back(special::kBos);
    dec_in.insert(dec_in.end(), target.begin(), target.end() - 1);

    nn::Var h = nn::embed_tokens(g, dec_in, cfg_);
    for (std::size_t i = 0; i < cfg_.n_layers_dec; ++i) h = nn::decoder_layer(g, dec_name(i), h, memory, cfg_);
    h = nn::layer_norm(g, "dec_ln", h);
    const nn::Var logits = nn::tied_logits(g, h);

    if (trace) {
        trace->encoder_len = input.size();
        trace->target_len = target.size();
        trace->memory_rows = g.rows(memory);
    }
    return g.cross_entropy(logits, target);
}

std::vector<double> RetrieverModel::pooled(const std::vector<TokenId>& ids) const {
    nn::Graph g(&params_);
    const nn::Var v = encode(g, ids);
    const auto m = g.value(v);
    return std::vector<double>(m.data(), m.data() + m.size());
}

SentenceEmbedding RetrieverModel::embed_sentence(const KnowledgeSentence& sentence, const Table& table,
                                                 const HighlightSet& highlights) const {
    const SegmentIds seg = segments(sentence.text, table, highlights);
    return {pooled(encoder_input(seg.knowledge, seg)), sentence.id};
}

SentenceEmbedding RetrieverModel::embed_query(const Table& table, const HighlightSet& highlights) const {
    const SegmentIds seg = segments("", table, highlights);
    return {pooled(encoder_input({}, seg)), ""};
}

std::vector<RetrievalResult> RetrieverModel::retrieve_topn(const PairRecord& pair, std::size_t n) const {
    if (n == 0) throw ValidationError("retrieve_topn needs n >= 1");
    const SentenceEmbedding q = embed_query(pair.table, pair.highlights);
    std::vector<RetrievalResult> all;
    for (const auto& s : pair.kb.sentences) {
        if (s.status == KbStatus::rejected) continue;
        const SentenceEmbedding e = embed_sentence(s, pair.table, pair.highlights);
        all.push_back({s.id, cosine(q.vector, e.vector)});
    }
    return top_n(std::move(all), n);
}

Vocabulary build_vocabulary_for(const std::vector<PairRecord>& pairs, std::size_t min_freq,
                                std::size_t max_size) {
    std::vector<std::vector<std::string>> corpus;
    for (const auto& p : pairs) {
        std::vector<std::string> kb;
        for (const auto& s : p.kb.sentences) kb.push_back(s.text);
        Segments seg = render_segments(p.table, p.highlights, kb);
        corpus.push_back(std::move(seg.table));
        corpus.push_back(std::move(seg.knowledge));
        corpus.push_back(tokenize(p.description));
    }
    return Vocabulary::build(corpus, min_freq, max_size);
}

nn::ModelConfig default_retriever_config(std::size_t vocab_size) {
    nn::ModelConfig cfg;
    cfg.d_model = 128;
    cfg.n_heads = 4;
    cfg.n_layers_enc = 1;
    cfg.n_layers_dec = 1;
    cfg.max_input_len = 256;
    cfg.vocab_size = vocab_size;
    return cfg;
}

RetrieverModel train_retriever(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                               nn::ModelConfig model_cfg, const nn::TrainConfig& train_cfg,
                               const RetrieverTrainOptions& opts, nn::TrainStats* stats) {
    train_cfg.validate();
    if (!(train_cfg.noise_ratio >= 0.0 && train_cfg.noise_ratio < 1.0))
        throw ConfigError("noise_ratio must lie in [0, 1)");
    RetrieverModel model(vocab, model_cfg, train_cfg.seed);

    std::vector<SegmentIds> examples;
    for (const auto& p : pairs) {
        for (const auto& s : p.kb.sentences) {
            if (s.status == KbStatus::rejected) continue;
            examples.push_back(model.segments(s.text, p.table, p.highlights));
        }
    }
    if (examples.empty()) throw ValidationError("no knowledge sentences to train the retriever on");

    const std::uint64_t noise_seed = util::derive_seed(train_cfg.seed, "corrupt");
    const nn::ExampleLoss loss = [&](nn::Graph& g, std::size_t i, std::size_t epoch) {
        util::CounterRng rng(util::derive_seed(noise_seed, epoch, i));
        const CorruptedInput c = corrupt(examples[i].knowledge, train_cfg.noise_ratio, rng);
        return model.reconstruction_loss(g, examples[i], c.token_ids);
    };
    nn::TrainStats s = nn::train(model.params(), examples.size(), loss, train_cfg, opts.threads, opts.on_epoch);
    util::log_info("retriever trained on " + std::to_string(examples.size()) + " sentences, final loss " +
                   (s.epoch_losses.empty() ? std::string("n/a") : std::to_string(s.epoch_losses.back())));
    if (stats) *stats = std::move(s);
    return model;
}

} // namespace ctrltab::retriever
