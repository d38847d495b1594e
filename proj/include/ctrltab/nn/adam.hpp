#pragma once

#include "ctrltab/nn/tensor.hpp"

#include <cstdint>
#include <vector>

namespace ctrltab::nn {

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Global-norm clipping threshold applied before the update; 0 disables.
    double clip_norm = 0.0;
};

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t step = 0;

    static AdamState for_params(const ParameterSet& params);
};

/// Clips `grads` in place to global norm `clip_norm` (if positive) and applies
/// one bias-corrected Adam update. Throws ValidationError naming the tensor if
/// any gradient entry is NaN or infinite; nothing is modified in that case.
/// Returns the pre-clipping global norm.
double adam_step(ParameterSet& params, Gradients& grads, AdamState& state,
                 const AdamHyper& hyper);

} // namespace ctrltab::nn
