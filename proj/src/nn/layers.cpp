#include "ctrltab/nn/layers.hpp"

#include <cmath>

namespace ctrltab::nn {
namespace {

double xavier(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void add_linear(ParameterSet& p, const std::string& prefix, const std::string& w,
                const std::string& b, std::size_t in, std::size_t out) {
    p.add(prefix + "." + w, {in, out}, ParameterSet::Init::uniform, xavier(in, out));
    p.add(prefix + "." + b, {out}, ParameterSet::Init::zeros);
}

void add_attention(ParameterSet& p, const std::string& prefix, std::size_t d) {
    add_linear(p, prefix, "wq", "bq", d, d);
    add_linear(p, prefix, "wk", "bk", d, d);
    add_linear(p, prefix, "wv", "bv", d, d);
    add_linear(p, prefix, "wo", "bo", d, d);
}

void add_ff(ParameterSet& p, const std::string& prefix, const ModelConfig& cfg) {
    add_linear(p, prefix, "w1", "b1", cfg.d_model, cfg.ff_width());
    add_linear(p, prefix, "w2", "b2", cfg.ff_width(), cfg.d_model);
}

Var linear(Graph& g, const std::string& prefix, const char* w, const char* b, Var x) {
    return g.add_row(g.matmul(x, g.param(prefix + "." + w)), g.param(prefix + "." + b));
}

Var feed_forward(Graph& g, const std::string& prefix, Var x) {
    return linear(g, prefix, "w2", "b2", g.gelu(linear(g, prefix, "w1", "b1", x)));
}

} // namespace

Matrix sinusoidal_positions(std::size_t len, std::size_t d) {
    Matrix pe(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(d));
    for (std::size_t pos = 0; pos < len; ++pos) {
        for (std::size_t i = 0; i < d; ++i) {
            const double rate =
                std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(d));
            const double angle = static_cast<double>(pos) * rate;
            pe(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(i)) =
                (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return pe;
}

Matrix causal_mask(std::size_t len) {
    const auto n = static_cast<Eigen::Index>(len);
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = r + 1; c < n; ++c) m(r, c) = -1e9;
    }
    return m;
}

void add_embedding_params(ParameterSet& params, const ModelConfig& cfg) {
    // Small enough that untrained logits h.e stay near uniform (std ~0.5).
    const double bound = std::sqrt(3.0) * 0.5 / std::sqrt(static_cast<double>(cfg.d_model));
    params.add("embed", {cfg.vocab_size, cfg.d_model}, ParameterSet::Init::uniform, bound);
}

void add_layer_norm_params(ParameterSet& params, const std::string& prefix,
                           const ModelConfig& cfg) {
    params.add(prefix + ".g", {cfg.d_model}, ParameterSet::Init::ones);
    params.add(prefix + ".b", {cfg.d_model}, ParameterSet::Init::zeros);
}

void add_encoder_layer_params(ParameterSet& params, const std::string& prefix,
                              const ModelConfig& cfg) {
    add_layer_norm_params(params, prefix + ".ln1", cfg);
    add_attention(params, prefix + ".attn", cfg.d_model);
    add_layer_norm_params(params, prefix + ".ln2", cfg);
    add_ff(params, prefix + ".ff", cfg);
}

void add_decoder_layer_params(ParameterSet& params, const std::string& prefix,
                              const ModelConfig& cfg) {
    add_layer_norm_params(params, prefix + ".ln1", cfg);
    add_attention(params, prefix + ".self", cfg.d_model);
    add_layer_norm_params(params, prefix + ".ln2", cfg);
    add_attention(params, prefix + ".cross", cfg.d_model);
    add_layer_norm_params(params, prefix + ".ln3", cfg);
    add_ff(params, prefix + ".ff", cfg);
}

Var embed_tokens(Graph& g, std::span<const TokenId> ids, const ModelConfig& cfg) {
    Var e = g.embedding(g.param("embed"), ids);
    e = g.scale(e, std::sqrt(static_cast<double>(cfg.d_model)));
    return g.add_constant(e, sinusoidal_positions(ids.size(), cfg.d_model));
}

Var multi_head_attention(Graph& g, const std::string& prefix, Var q_in, Var kv_in,
                         const ModelConfig& cfg, const Matrix* mask) {
    const Var q = linear(g, prefix, "wq", "bq", q_in);
    const Var k = linear(g, prefix, "wk", "bk", kv_in);
    const Var v = linear(g, prefix, "wv", "bv", kv_in);
    const std::size_t dh = cfg.d_model / cfg.n_heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    std::vector<Var> heads;
    heads.reserve(cfg.n_heads);
    for (std::size_t h = 0; h < cfg.n_heads; ++h) {
        const Var qh = g.slice_cols(q, h * dh, dh);
        const Var kh = g.slice_cols(k, h * dh, dh);
        const Var vh = g.slice_cols(v, h * dh, dh);
        Var scores = g.scale(g.matmul_nt(qh, kh), scale);
        if (mask) scores = g.add_constant(scores, *mask);
        heads.push_back(g.matmul(g.softmax_rows(scores), vh));
    }
    const Var merged = cfg.n_heads == 1 ? heads.front() : g.concat_cols(heads);
    return linear(g, prefix, "wo", "bo", merged);
}

Var layer_norm(Graph& g, const std::string& prefix, Var x) {
    return g.layer_norm(x, g.param(prefix + ".g"), g.param(prefix + ".b"));
}

Var encoder_layer(Graph& g, const std::string& prefix, Var x, const ModelConfig& cfg) {
    const Var n1 = layer_norm(g, prefix + ".ln1", x);
    x = g.add(x, multi_head_attention(g, prefix + ".attn", n1, n1, cfg, nullptr));
    const Var n2 = layer_norm(g, prefix + ".ln2", x);
    return g.add(x, feed_forward(g, prefix + ".ff", n2));
}

Var decoder_layer(Graph& g, const std::string& prefix, Var x, Var memory,
                  const ModelConfig& cfg) {
    const Matrix mask = causal_mask(g.rows(x));
    const Var n1 = layer_norm(g, prefix + ".ln1", x);
    x = g.add(x, multi_head_attention(g, prefix + ".self", n1, n1, cfg, &mask));
    const Var n2 = layer_norm(g, prefix + ".ln2", x);
    x = g.add(x, multi_head_attention(g, prefix + ".cross", n2, memory, cfg, nullptr));
    const Var n3 = layer_norm(g, prefix + ".ln3", x);
    return g.add(x, feed_forward(g, prefix + ".ff", n3));
}

Var tied_logits(Graph& g, Var hidden) { return g.matmul_nt(hidden, g.param("embed")); }

} // namespace ctrltab::nn
