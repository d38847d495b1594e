#pragma once

#include "ctrltab/nn/tensor.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace ctrltab::nn {

/// Handle to a node on a Graph.
struct Var {
    int id = -1;
};

/// Reverse-mode automatic differentiation tape over 2-D float64 matrices.
///
/// Nodes are appended in evaluation order; backward() walks them in reverse,
/// so gradient accumulation order is fixed by the forward program. Parameter
/// nodes read the ParameterSet in place and accumulate into one gradient per
/// parameter even when a tensor is used more than once (tied embeddings).
/// A Graph is single-use and not thread-safe; build one per example.
class Graph {
public:
    explicit Graph(const ParameterSet* params = nullptr);

    Var param(std::size_t index);
    Var param(std::string_view name);
    Var constant(Matrix value);

    ConstMatrixMap value(Var v) const;
    double scalar(Var v) const;
    std::size_t rows(Var v) const;
    std::size_t cols(Var v) const;

    Var matmul(Var a, Var b);
    /// a * b^T
    Var matmul_nt(Var a, Var b);
    Var add(Var a, Var b);
    /// Adds a 1 x n row to every row of `a`.
    Var add_row(Var a, Var row);
    /// Adds a fixed matrix (positions, masks); no gradient flows into it.
    Var add_constant(Var a, const Matrix& c);
    Var scale(Var a, double s);
    Var mul(Var a, Var b);
    Var gelu(Var a);
    Var softmax_rows(Var a);
    Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
    Var embedding(Var table, std::span<const std::int32_t> ids);
    Var mean_rows(Var a);
    Var slice_cols(Var a, std::size_t start, std::size_t count);
    Var concat_cols(const std::vector<Var>& parts);
    Var sum(Var a);
    Var sum_squares_half(Var a);

    /// Elementwise map with a caller-supplied derivative.
    Var elementwise(Var a, std::function<double(double)> f, std::function<double(double)> df);

    /// Mean over unmasked rows of -log softmax(logits)[target]. Rows whose
    /// mask entry is false are skipped; an empty mask means all rows count.
    /// Throws ValidationError when a target is outside [0, cols).
    Var cross_entropy(Var logits, std::span<const std::int32_t> targets,
                      std::span<const bool> mask = {});

    /// Seeds d(loss)/d(loss) = 1 and propagates. Throws ValidationError unless
    /// `loss` is 1 x 1.
    void backward(Var loss);

    /// Gradients of every parameter after backward(); unused parameters get
    /// zero matrices.
    Gradients parameter_gradients() const;

    /// Gradient held by any node after backward() (zeros if none reached it).
    Matrix gradient(Var v) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Matrix value;
        const double* external = nullptr;
        Eigen::Index ext_rows = 0;
        Eigen::Index ext_cols = 0;
        Matrix grad;
        bool has_grad = false;
        std::function<void(Graph&, int)> backward;
    };

    Var push(Matrix value, std::function<void(Graph&, int)> backward);
    MatrixMap grad_ref(int id);
    ConstMatrixMap grad_of(int id) const;

    const ParameterSet* params_;
    std::vector<Node> nodes_;
    std::vector<int> param_nodes_;
};

} // namespace ctrltab::nn
