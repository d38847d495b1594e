#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ctrltab::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

/// Dense row-major float64 tensor. Rank 1 and 2 are used; rank-1 tensors act
/// as 1 x n matrices in the graph.
struct Tensor {
    std::vector<std::size_t> shape;
    // Aligned so vectorized reductions take the same path for every copy.
    std::vector<double, Eigen::aligned_allocator<double>> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s);

    std::size_t numel() const { return data.size(); }
    std::size_t rows() const { return shape.size() == 2 ? shape[0] : 1; }
    std::size_t cols() const { return shape.empty() ? 0 : shape.back(); }

    MatrixMap matrix() {
        return {data.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
    }
    ConstMatrixMap matrix() const {
        return {data.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
    }

    bool all_finite() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Named parameter tensors in registration order, plus the init seed.
class ParameterSet {
public:
    ParameterSet() = default;
    explicit ParameterSet(std::uint64_t seed) : seed_(seed) {}

    enum class Init { zeros, ones, uniform };

    /// Registers a tensor. `uniform` draws from U(-bound, bound) with a
    /// counter-based stream keyed by (seed, name), so values do not depend on
    /// registration order. Throws ConfigError on a duplicate name.
    std::size_t add(std::string name, std::vector<std::size_t> shape, Init init,
                    double bound = 0.0);

    /// Registers an existing tensor verbatim (checkpoint loading).
    std::size_t add_tensor(std::string name, Tensor t);

    std::size_t size() const { return tensors_.size(); }
    std::size_t index(std::string_view name) const;
    bool contains(std::string_view name) const;
    const std::string& name(std::size_t i) const { return names_[i]; }
    Tensor& at(std::size_t i) { return tensors_[i]; }
    const Tensor& at(std::size_t i) const { return tensors_[i]; }
    Tensor& at(std::string_view name) { return tensors_[index(name)]; }
    const Tensor& at(std::string_view name) const { return tensors_[index(name)]; }
    std::uint64_t seed() const { return seed_; }
    std::size_t numel() const;

    friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
        return a.names_ == b.names_ && a.tensors_ == b.tensors_ && a.seed_ == b.seed_;
    }

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
    std::uint64_t seed_ = 0;
};

/// One gradient matrix per parameter, aligned with a ParameterSet.
struct Gradients {
    std::vector<Matrix> grads;

    static Gradients zeros_like(const ParameterSet& params);
    void add(const Gradients& other);
    void scale(double s);
    double global_norm() const;
};

} // namespace ctrltab::nn
