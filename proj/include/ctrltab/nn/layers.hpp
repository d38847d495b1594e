#pragma once

#include "ctrltab/core/vocabulary.hpp"
#include "ctrltab/nn/config.hpp"
#include "ctrltab/nn/graph.hpp"
#include "ctrltab/nn/tensor.hpp"

#include <span>
#include <string>
#include <vector>

namespace ctrltab::nn {

/// Sinusoidal position table, `len` x `d`.
Matrix sinusoidal_positions(std::size_t len, std::size_t d);

/// Additive attention mask hiding future positions (large negative above the
/// diagonal).
Matrix causal_mask(std::size_t len);

/// Registers the tied embedding table "embed" (vocab_size x d_model).
void add_embedding_params(ParameterSet& params, const ModelConfig& cfg);

/// Pre-norm transformer layers. Parameter names are prefix + "." + part.
void add_encoder_layer_params(ParameterSet& params, const std::string& prefix,
                              const ModelConfig& cfg);
void add_decoder_layer_params(ParameterSet& params, const std::string& prefix,
                              const ModelConfig& cfg);
void add_layer_norm_params(ParameterSet& params, const std::string& prefix,
                           const ModelConfig& cfg);

/// Token embeddings scaled by sqrt(d_model) plus sinusoidal positions.
Var embed_tokens(Graph& g, std::span<const TokenId> ids, const ModelConfig& cfg);

/// Multi-head attention: queries from `q_in`, keys and values from `kv_in`.
/// `mask` (optional) is added to the pre-softmax scores.
Var multi_head_attention(Graph& g, const std::string& prefix, Var q_in, Var kv_in,
                         const ModelConfig& cfg, const Matrix* mask);

Var layer_norm(Graph& g, const std::string& prefix, Var x);

Var encoder_layer(Graph& g, const std::string& prefix, Var x, const ModelConfig& cfg);

/// Causal self-attention, then cross-attention over `memory`, then
/// feed-forward, each a pre-norm residual branch.
Var decoder_layer(Graph& g, const std::string& prefix, Var x, Var memory,
                  const ModelConfig& cfg);

/// Logits h_t . e_i against the tied embedding table.
Var tied_logits(Graph& g, Var hidden);

} // namespace ctrltab::nn
