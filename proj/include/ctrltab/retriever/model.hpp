#pragma once

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
#include <vector>

namespace ctrltab::retriever {

inline constexpr std::string_view kModelKind = "retriever";

/// Token ids of one (sentence, table, highlights) training example, each
/// segment without its separator.
struct SegmentIds {
    std::vector<TokenId> knowledge;
    std::vector<TokenId> table;
    std::vector<TokenId> highlights;
};

struct SentenceEmbedding {
    std::vector<double> vector;
    std::string sentence_id;
};

/// Shape facts recorded during a reconstruction forward pass.
struct ReconstructionTrace {
    std::size_t encoder_len = 0;
    std::size_t target_len = 0;
    std::size_t memory_rows = 0;
};

/// Conditioned denoising autoencoder. The encoder reads
/// [corrupted B : T : H], its outputs are mean-pooled into one vector, and
/// a decoder that cross-attends only to that vector reconstructs the clean
/// [B : T : H] through logits tied to the input embedding table.
class RetrieverModel {
public:
    RetrieverModel(Vocabulary vocab, nn::ModelConfig cfg, std::uint64_t seed);

    static RetrieverModel from_checkpoint(nn::Checkpoint ckpt);
    nn::Checkpoint to_checkpoint() const;

    const Vocabulary& vocab() const { return vocab_; }
    const nn::ModelConfig& config() const { return cfg_; }
    nn::ParameterSet& params() { return params_; }
    const nn::ParameterSet& params() const { return params_; }

    /// Renders and encodes the segments of one example, trimming the knowledge
    /// then the table segment so the encoder input fits max_input_len.
    SegmentIds segments(const std::string& sentence, const Table& table,
                        const HighlightSet& highlights) const;

    /// Encoder input [SEP_B, B, SEP_T, T, SEP_H, H].
    static std::vector<TokenId> encoder_input(const std::vector<TokenId>& knowledge,
                                              const SegmentIds& seg);

    /// Mean-pooled encoder state for the given input ids (1 x d_model).
    nn::Var encode(nn::Graph& g, const std::vector<TokenId>& input_ids) const;

    /// Reconstruction cross-entropy of the clean segments given a corrupted
    /// knowledge segment.
    nn::Var reconstruction_loss(nn::Graph& g, const SegmentIds& clean,
                                const std::vector<TokenId>& corrupted_knowledge,
                                ReconstructionTrace* trace = nullptr) const;

    SentenceEmbedding embed_sentence(const KnowledgeSentence& sentence, const Table& table,
                                     const HighlightSet& highlights) const;
    SentenceEmbedding embed_query(const Table& table, const HighlightSet& highlights) const;

    /// Top-n knowledge sentences of `pair` by cosine against the query
    /// embedding. n larger than the KB returns everything.
    std::vector<RetrievalResult> retrieve_topn(const PairRecord& pair, std::size_t n = 3) const;

private:
    std::vector<double> pooled(const std::vector<TokenId>& ids) const;

    Vocabulary vocab_;
    nn::ModelConfig cfg_;
    nn::ParameterSet params_;
};

/// Builds a vocabulary over tables, highlights, knowledge and descriptions.
Vocabulary build_vocabulary_for(const std::vector<PairRecord>& pairs, std::size_t min_freq,
                                std::size_t max_size);

struct RetrieverTrainOptions {
    unsigned threads = 1;
    nn::EpochCallback on_epoch;
};

/// One training example per (pair, KB sentence). Only the knowledge segment
/// is corrupted; corruption is drawn from (seed, epoch, example) so it is
/// reproducible regardless of scheduling. Throws ValidationError when there
/// are no sentences to train on.
RetrieverModel train_retriever(const std::vector<PairRecord>& pairs, const Vocabulary& vocab,
                               nn::ModelConfig model_cfg, const nn::TrainConfig& train_cfg,
                               const RetrieverTrainOptions& opts = {},
                               nn::TrainStats* stats = nullptr);

/// Desk-scale defaults: 1+1 layers, d_model 128, 4 heads, max input 256.
nn::ModelConfig default_retriever_config(std::size_t vocab_size);

} // namespace ctrltab::retriever
