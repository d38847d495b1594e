#include "ctrltab/nn/config.hpp"

#include "ctrltab/util/error.hpp"

namespace ctrltab::nn {

void ModelConfig::validate() const {
    if (d_model == 0 || n_heads == 0 || n_layers_enc == 0 || n_layers_dec == 0 ||
        max_input_len == 0 || max_output_len == 0 || vocab_size == 0)
        throw ConfigError("model config: all sizes must be positive");
    if (d_model % n_heads != 0) throw ConfigError("model config: d_model not divisible by n_heads");
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0)) throw ConfigError("train config: learning_rate must be > 0");
    if (batch_size == 0) throw ConfigError("train config: batch_size must be >= 1");
    if (!(noise_ratio >= 0 && noise_ratio < 1))
        throw ConfigError("train config: noise_ratio must lie in [0, 1)");
    if (grad_clip_norm < 0) throw ConfigError("train config: grad_clip_norm must be >= 0");
}

} // namespace ctrltab::nn
