#include "ctrltab/nn/tensor.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/rng.hpp"

#include <cmath>
#include <numeric>

namespace ctrltab::nn {

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    const std::size_t n =
        std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    data.assign(shape.empty() ? 0 : n, 0.0);
}

bool Tensor::all_finite() const {
    for (double x : data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::size_t ParameterSet::add(std::string name, std::vector<std::size_t> shape, Init init,
                              double bound) {
    Tensor t(std::move(shape));
    switch (init) {
    case Init::zeros: break;
    case Init::ones: std::fill(t.data.begin(), t.data.end(), 1.0); break;
    case Init::uniform: {
        util::CounterRng rng(util::derive_seed(seed_, name));
        for (double& x : t.data) x = rng.uniform(-bound, bound);
        break;
    }
    }
    return add_tensor(std::move(name), std::move(t));
}

std::size_t ParameterSet::add_tensor(std::string name, Tensor t) {
    if (contains(name)) throw ConfigError("duplicate parameter '" + name + "'");
    names_.push_back(std::move(name));
    tensors_.push_back(std::move(t));
    return tensors_.size() - 1;
}

std::size_t ParameterSet::index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    throw NotFoundError("no parameter named '" + std::string(name) + "'");
}

bool ParameterSet::contains(std::string_view name) const {
    for (const auto& n : names_) {
        if (n == name) return true;
    }
    return false;
}

std::size_t ParameterSet::numel() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += t.numel();
    return n;
}

Gradients Gradients::zeros_like(const ParameterSet& params) {
    Gradients g;
    g.grads.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& t = params.at(i);
        g.grads.push_back(Matrix::Zero(static_cast<Eigen::Index>(t.rows()),
                                       static_cast<Eigen::Index>(t.cols())));
    }
    return g;
}

void Gradients::add(const Gradients& other) {
    if (grads.size() != other.grads.size()) throw ValidationError("gradient sets differ in size");
    for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += other.grads[i];
}

void Gradients::scale(double s) {
    for (auto& g : grads) g *= s;
}

double Gradients::global_norm() const {
    double sq = 0;
    for (const auto& g : grads) sq += g.squaredNorm();
    return std::sqrt(sq);
}

} // namespace ctrltab::nn
