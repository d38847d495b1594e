#pragma once

#include "ctrltab/nn/graph.hpp"
#include "ctrltab/nn/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ctrltab::nn {

/// Builds a scalar loss on the given graph. Must be deterministic.
using LossBuilder = std::function<Var(Graph&)>;

struct GradCheckOptions {
    double eps = 1e-5;
    std::size_t samples_per_tensor = 64;
    std::uint64_t seed = 42;
    /// Denominator floor for the relative error, so coordinates whose true
    /// gradient is ~0 compare absolutely.
    double abs_floor = 1e-6;
};

struct TensorCheck {
    std::string name;
    std::size_t checked = 0;
    double max_rel_error = 0;
};

struct GradCheckReport {
    double max_rel_error = 0;
    std::vector<TensorCheck> tensors;
};

/// Compares reverse-mode gradients against central differences on a random
/// sample of coordinates per tensor. Relative error per coordinate is
/// |analytic - numeric| / max(|analytic|, |numeric|, abs_floor).
/// Throws ConfigError unless eps lies in [1e-7, 1e-3].
GradCheckReport gradient_check(const LossBuilder& loss, ParameterSet params,
                               const GradCheckOptions& opts = {});

} // namespace ctrltab::nn
