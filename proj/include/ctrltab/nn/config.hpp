#pragma once

#include <cstddef>
#include <cstdint>

namespace ctrltab::nn {

struct ModelConfig {
    std::size_t d_model = 128;
    std::size_t n_heads = 4;
    std::size_t n_layers_enc = 1;
    std::size_t n_layers_dec = 1;
    std::size_t max_input_len = 256;
    std::size_t max_output_len = 64;
    std::size_t vocab_size = 0;
    /// Feed-forward width; 0 means 4 * d_model.
    std::size_t d_ff = 0;

    std::size_t ff_width() const { return d_ff ? d_ff : 4 * d_model; }

    /// Throws ConfigError unless all sizes are positive and d_model divides
    /// evenly across heads.
    void validate() const;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 8;
    std::size_t epochs = 10;
    /// Global-norm clip threshold; 0 disables clipping.
    double grad_clip_norm = 1.0;
    std::uint64_t seed = 42;
    /// Token deletion ratio, retriever only.
    double noise_ratio = 0.6;

    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

} // namespace ctrltab::nn
