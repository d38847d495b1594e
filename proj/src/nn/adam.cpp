#include "ctrltab/nn/adam.hpp"

#include "ctrltab/util/error.hpp"

#include <cmath>

namespace ctrltab::nn {

AdamState AdamState::for_params(const ParameterSet& params) {
    AdamState s;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& t = params.at(i);
        s.m.push_back(Matrix::Zero(static_cast<Eigen::Index>(t.rows()),
                                   static_cast<Eigen::Index>(t.cols())));
        s.v.push_back(s.m.back());
    }
    return s;
}

double adam_step(ParameterSet& params, Gradients& grads, AdamState& state,
                 const AdamHyper& hyper) {
    if (grads.grads.size() != params.size() || state.m.size() != params.size())
        throw ValidationError("adam: parameter/gradient/state count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& g = grads.grads[i];
        if (static_cast<std::size_t>(g.rows()) != params.at(i).rows() ||
            static_cast<std::size_t>(g.cols()) != params.at(i).cols())
            throw ValidationError("adam: gradient shape mismatch for '" + params.name(i) + "'");
        if (!g.allFinite())
            throw ValidationError("adam: non-finite gradient in tensor '" + params.name(i) + "'");
    }
    const double norm = grads.global_norm();
    if (hyper.clip_norm > 0 && norm > hyper.clip_norm) grads.scale(hyper.clip_norm / norm);

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(hyper.beta1, t);
    const double c2 = 1.0 - std::pow(hyper.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& g = grads.grads[i];
        auto& m = state.m[i];
        auto& v = state.v[i];
        m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
        v = hyper.beta2 * v + (1.0 - hyper.beta2) * g.cwiseProduct(g);
        auto w = params.at(i).matrix();
        w.array() -= hyper.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + hyper.epsilon);
    }
    return norm;
}

} // namespace ctrltab::nn
