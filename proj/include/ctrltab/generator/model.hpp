#pragma once

#include "ctrltab/core/linearize.hpp"
#include "ctrltab/core/types.hpp"
#include "ctrltab/core/vocabulary.hpp"
#include "ctrltab/nn/checkpoint.hpp"
#include "ctrltab/nn/config.hpp"
#include "ctrltab/nn/graph.hpp"
#include "ctrltab/nn/tensor.hpp"
#include "ctrltab/nn/trainer.hpp"
#include "ctrltab/retriever/retrieval.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::retriever {
class RetrieverModel;
}

namespace ctrltab::generator {

inline constexpr std::string_view kModelKind = "generator";
inline constexpr std::size_t kDefaultNKb = 3;

/// Picks up to n knowledge sentences of a pair, best first.
using KnowledgeSelector =
    std::function<std::vector<retriever::RetrievalResult>(const PairRecord& pair, std::size_t n)>;

/// Selector backed by a trained retriever. The model must outlive it.
KnowledgeSelector neural_selector(const retriever::RetrieverModel& model);

/// Per-pair TF-IDF over the pair's own KB, queried with the table and
/// highlight tokens.
KnowledgeSelector tfidf_selector();

/// Encoder-decoder over the HTB linearization with teacher-forced training
/// on the description. Output logits are tied to the input embedding table.
class GeneratorModel {
public:
    GeneratorModel(Vocabulary vocab, nn::ModelConfig cfg, std::uint64_t seed, bool use_bkg,
                   std::size_t n_kb = kDefaultNKb);

    static GeneratorModel from_checkpoint(nn::Checkpoint ckpt);
    nn::Checkpoint to_checkpoint() const;

    const Vocabulary& vocab() const { return vocab_; }
    const nn::ModelConfig& config() const { return cfg_; }
    nn::ParameterSet& params() { return params_; }
    const nn::ParameterSet& params() const { return params_; }
    bool use_bkg() const { return use_bkg_; }
    std::size_t n_kb() const { return n_kb_; }

    /// Linearized encoder input. The knowledge segment is empty unless the
    /// model uses background knowledge.
    LinearizedInput input_for(const PairRecord& pair,
                              const std::vector<KnowledgeSentence>& selected) const;

    /// Description ids, capped at max_output_len - 1, followed by EOS.
    std::vector<TokenId> target_for(const std::string& description) const;

    /// Encoder states, one row per input token.
    nn::Var encode(nn::Graph& g, const std::vector<TokenId>& input_ids) const;

    /// Decoder logits for every position of `decoder_input`.
    nn::Var decode_logits(nn::Graph& g, nn::Var memory, const std::vector<TokenId>& decoder_input) const;

    /// Mean token cross-entropy of `target` (ending in EOS) with decoder
    /// input BOS + target[:-1].
    nn::Var teacher_forced_loss(nn::Graph& g, const std::vector<TokenId>& input_ids,
                                const std::vector<TokenId>& target) const;

private:
    Vocabulary vocab_;
    nn::ModelConfig cfg_;
    nn::ParameterSet params_;
    bool use_bkg_;
    std::size_t n_kb_;
};

/// Sentences of `pair` named by `results`, in result order.
std::vector<KnowledgeSentence> select_sentences(const PairRecord& pair,
                                                const std::vector<retriever::RetrievalResult>& results);

struct GeneratorTrainOptions {
    unsigned threads = 1;
    nn::EpochCallback on_epoch;
};

/// Trains on pairs with a non-empty description. With use_bkg the selector
/// supplies the top n_kb sentences of each pair once, before training; a
/// missing selector is a ConfigError. Throws ValidationError when no pair
/// has a description.
GeneratorModel train_generator(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                               const KnowledgeSelector& selector,
                               std::size_t n_kb, nn::ModelConfig model_cfg, const nn::TrainConfig& train_cfg,
                               bool use_bkg, const GeneratorTrainOptions& opts = {},
                               nn::TrainStats* stats = nullptr);

/// Desk-scale defaults: 2+2 layers, d_model 128, 4 heads, max input 512,
/// max output 64.
nn::ModelConfig default_generator_config(std::size_t vocab_size);

} // namespace ctrltab::generator
