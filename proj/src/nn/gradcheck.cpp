#include "ctrltab/nn/gradcheck.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ctrltab::nn {
namespace {

double evaluate(const LossBuilder& loss, const ParameterSet& params) {
    Graph g(&params);
    return g.scalar(loss(g));
}

std::vector<std::size_t> sample_coordinates(std::size_t n, std::size_t k, std::uint64_t key) {
    std::vector<std::size_t> out;
    if (n <= k) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(i);
        return out;
    }
    util::CounterRng rng(key);
    std::set<std::size_t> chosen;
    while (chosen.size() < k) chosen.insert(static_cast<std::size_t>(rng.below(n)));
    return {chosen.begin(), chosen.end()};
}

} // namespace

GradCheckReport gradient_check(const LossBuilder& loss, ParameterSet params,
                               const GradCheckOptions& opts) {
    if (!(opts.eps >= 1e-7 && opts.eps <= 1e-3))
        throw ConfigError("gradient_check: eps must lie in [1e-7, 1e-3]");
    Gradients analytic;
    {
        Graph g(&params);
        const Var l = loss(g);
        g.backward(l);
        analytic = g.parameter_gradients();
    }
    GradCheckReport report;
    for (std::size_t t = 0; t < params.size(); ++t) {
        TensorCheck check;
        check.name = params.name(t);
        auto& data = params.at(t).data;
        const auto coords = sample_coordinates(
            data.size(), opts.samples_per_tensor, util::derive_seed(opts.seed, check.name));
        for (std::size_t idx : coords) {
            const double orig = data[idx];
            data[idx] = orig + opts.eps;
            const double up = evaluate(loss, params);
            data[idx] = orig - opts.eps;
            const double down = evaluate(loss, params);
            data[idx] = orig;
            const double numeric = (up - down) / (2.0 * opts.eps);
            const double a = analytic.grads[t].data()[idx];
            const double denom = std::max({std::abs(a), std::abs(numeric), opts.abs_floor});
            check.max_rel_error = std::max(check.max_rel_error, std::abs(a - numeric) / denom);
            ++check.checked;
        }
        report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
        report.tensors.push_back(std::move(check));
    }
    return report;
}

} // namespace ctrltab::nn
