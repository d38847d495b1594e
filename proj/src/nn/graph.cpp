#include "ctrltab/nn/graph.hpp"

#include "ctrltab/util/error.hpp"

#include <cmath>

namespace ctrltab::nn {
namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
} // namespace

Graph::Graph(const ParameterSet* params) : params_(params) {
    if (params_) param_nodes_.assign(params_->size(), -1);
}

Var Graph::push(Matrix value, std::function<void(Graph&, int)> backward) {
    Node n;
    n.value = std::move(value);
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size() - 1)};
}

Var Graph::param(std::size_t index) {
    if (!params_ || index >= params_->size()) throw NotFoundError("graph: no such parameter");
    if (param_nodes_[index] >= 0) return Var{param_nodes_[index]};
    const Tensor& t = params_->at(index);
    Node n;
    n.external = t.data.data();
    n.ext_rows = static_cast<Eigen::Index>(t.rows());
    n.ext_cols = static_cast<Eigen::Index>(t.cols());
    nodes_.push_back(std::move(n));
    param_nodes_[index] = static_cast<int>(nodes_.size() - 1);
    return Var{param_nodes_[index]};
}

Var Graph::param(std::string_view name) {
    if (!params_) throw NotFoundError("graph: no parameter set");
    return param(params_->index(name));
}

Var Graph::constant(Matrix value) { return push(std::move(value), nullptr); }

ConstMatrixMap Graph::value(Var v) const {
    const Node& n = nodes_.at(static_cast<std::size_t>(v.id));
    if (n.external) return {n.external, n.ext_rows, n.ext_cols};
    return {n.value.data(), n.value.rows(), n.value.cols()};
}

double Graph::scalar(Var v) const {
    auto m = value(v);
    if (m.rows() != 1 || m.cols() != 1) throw ValidationError("graph: value is not a scalar");
    return m(0, 0);
}

std::size_t Graph::rows(Var v) const { return static_cast<std::size_t>(value(v).rows()); }
std::size_t Graph::cols(Var v) const { return static_cast<std::size_t>(value(v).cols()); }

MatrixMap Graph::grad_ref(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad) {
        const auto v = value(Var{id});
        n.grad = Matrix::Zero(v.rows(), v.cols());
        n.has_grad = true;
    }
    return {n.grad.data(), n.grad.rows(), n.grad.cols()};
}

ConstMatrixMap Graph::grad_of(int id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    return {n.grad.data(), n.grad.rows(), n.grad.cols()};
}

Var Graph::matmul(Var a, Var b) {
    if (cols(a) != rows(b)) throw ValidationError("matmul: inner dimensions differ");
    Matrix out = value(a) * value(b);
    return push(std::move(out), [a, b](Graph& g, int self) {
        const auto dy = g.grad_of(self);
        g.grad_ref(a.id).noalias() += dy * g.value(b).transpose();
        g.grad_ref(b.id).noalias() += g.value(a).transpose() * dy;
    });
}

Var Graph::matmul_nt(Var a, Var b) {
    if (cols(a) != cols(b)) throw ValidationError("matmul_nt: inner dimensions differ");
    Matrix out = value(a) * value(b).transpose();
    return push(std::move(out), [a, b](Graph& g, int self) {
        const auto dy = g.grad_of(self);
        g.grad_ref(a.id).noalias() += dy * g.value(b);
        g.grad_ref(b.id).noalias() += dy.transpose() * g.value(a);
    });
}

Var Graph::add(Var a, Var b) {
    if (rows(a) != rows(b) || cols(a) != cols(b)) throw ValidationError("add: shape mismatch");
    Matrix out = value(a) + value(b);
    return push(std::move(out), [a, b](Graph& g, int self) {
        g.grad_ref(a.id) += g.grad_of(self);
        g.grad_ref(b.id) += g.grad_of(self);
    });
}

Var Graph::add_row(Var a, Var row) {
    if (rows(row) != 1 || cols(row) != cols(a)) throw ValidationError("add_row: shape mismatch");
    Matrix out = value(a).rowwise() + value(row).row(0);
    return push(std::move(out), [a, row](Graph& g, int self) {
        const auto dy = g.grad_of(self);
        g.grad_ref(a.id) += dy;
        g.grad_ref(row.id) += dy.colwise().sum();
    });
}

Var Graph::add_constant(Var a, const Matrix& c) {
    if (static_cast<std::size_t>(c.rows()) != rows(a) ||
        static_cast<std::size_t>(c.cols()) != cols(a))
        throw ValidationError("add_constant: shape mismatch");
    Matrix out = value(a) + c;
    return push(std::move(out),
                [a](Graph& g, int self) { g.grad_ref(a.id) += g.grad_of(self); });
}

Var Graph::scale(Var a, double s) {
    Matrix out = value(a) * s;
    return push(std::move(out),
                [a, s](Graph& g, int self) { g.grad_ref(a.id) += g.grad_of(self) * s; });
}

Var Graph::mul(Var a, Var b) {
    if (rows(a) != rows(b) || cols(a) != cols(b)) throw ValidationError("mul: shape mismatch");
    Matrix out = value(a).cwiseProduct(value(b));
    return push(std::move(out), [a, b](Graph& g, int self) {
        const auto dy = g.grad_of(self);
        g.grad_ref(a.id) += dy.cwiseProduct(g.value(b));
        g.grad_ref(b.id) += dy.cwiseProduct(g.value(a));
    });
}

Var Graph::gelu(Var a) {
    const auto x = value(a);
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double v = x.data()[i];
        out.data()[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
    }
    return push(std::move(out), [a](Graph& g, int self) {
        const auto x = g.value(a);
        const auto dy = g.grad_of(self);
        auto dx = g.grad_ref(a.id);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double v = x.data()[i];
            const double d =
                0.5 * (1.0 + std::erf(v * kInvSqrt2)) + v * kInvSqrt2Pi * std::exp(-0.5 * v * v);
            dx.data()[i] += dy.data()[i] * d;
        }
    });
}

Var Graph::softmax_rows(Var a) {
    const auto x = value(a);
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double m = x.row(r).maxCoeff();
        out.row(r) = (x.row(r).array() - m).exp().matrix();
        out.row(r) /= out.row(r).sum();
    }
    return push(std::move(out), [a](Graph& g, int self) {
        const auto y = g.value(Var{self});
        const auto dy = g.grad_of(self);
        auto dx = g.grad_ref(a.id);
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
            const double dot = y.row(r).dot(dy.row(r));
            dx.row(r).array() += y.row(r).array() * (dy.row(r).array() - dot);
        }
    });
}

Var Graph::layer_norm(Var x, Var gamma, Var beta, double eps) {
    const auto v = value(x);
    const Eigen::Index n = v.cols();
    if (static_cast<Eigen::Index>(cols(gamma)) != n || static_cast<Eigen::Index>(cols(beta)) != n)
        throw ValidationError("layer_norm: gain/bias width mismatch");
    Matrix xhat(v.rows(), n);
    Eigen::VectorXd inv_std(v.rows());
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        const double mean = v.row(r).mean();
        const double var = (v.row(r).array() - mean).square().mean();
        inv_std(r) = 1.0 / std::sqrt(var + eps);
        xhat.row(r) = (v.row(r).array() - mean) * inv_std(r);
    }
    Matrix out = (xhat.array().rowwise() * value(gamma).row(0).array()).rowwise() +
                 value(beta).row(0).array();
    return push(std::move(out), [x, gamma, beta, xhat = std::move(xhat),
                                 inv_std = std::move(inv_std)](Graph& g, int self) {
        const auto dy = g.grad_of(self);
        const auto gam = g.value(gamma);
        g.grad_ref(gamma.id) += dy.cwiseProduct(xhat).colwise().sum();
        g.grad_ref(beta.id) += dy.colwise().sum();
        auto dx = g.grad_ref(x.id);
        const double n = static_cast<double>(xhat.cols());
        for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
            const Eigen::RowVectorXd dxhat = dy.row(r).cwiseProduct(gam.row(0));
            const double mean_d = dxhat.sum() / n;
            const double mean_dx = dxhat.dot(xhat.row(r)) / n;
            dx.row(r).array() +=
                inv_std(r) * (dxhat.array() - mean_d - xhat.row(r).array() * mean_dx);
        }
    });
}

Var Graph::embedding(Var table, std::span<const std::int32_t> ids) {
    const auto t = value(table);
    Matrix out(static_cast<Eigen::Index>(ids.size()), t.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= t.rows()) throw ValidationError("embedding: id out of range");
        out.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]);
    }
    std::vector<std::int32_t> idv(ids.begin(), ids.end());
    return push(std::move(out), [table, idv = std::move(idv)](Graph& g, int self) {
        const auto dy = g.grad_of(self);
        auto dt = g.grad_ref(table.id);
        for (std::size_t i = 0; i < idv.size(); ++i)
            dt.row(idv[i]) += dy.row(static_cast<Eigen::Index>(i));
    });
}

Var Graph::mean_rows(Var a) {
    const auto x = value(a);
    if (x.rows() == 0) throw ValidationError("mean_rows: no rows");
    Matrix out = x.colwise().mean();
    return push(std::move(out), [a](Graph& g, int self) {
        auto dx = g.grad_ref(a.id);
        const auto dy = g.grad_of(self);
        const double inv = 1.0 / static_cast<double>(dx.rows());
        dx.rowwise() += dy.row(0) * inv;
    });
}

Var Graph::slice_cols(Var a, std::size_t start, std::size_t count) {
    if (start + count > cols(a)) throw ValidationError("slice_cols: out of range");
    const auto s = static_cast<Eigen::Index>(start);
    const auto c = static_cast<Eigen::Index>(count);
    Matrix out = value(a).middleCols(s, c);
    return push(std::move(out), [a, s, c](Graph& g, int self) {
        g.grad_ref(a.id).middleCols(s, c) += g.grad_of(self);
    });
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ValidationError("concat_cols: no inputs");
    const std::size_t r = rows(parts[0]);
    std::size_t total = 0;
    for (Var p : parts) {
        if (rows(p) != r) throw ValidationError("concat_cols: row mismatch");
        total += cols(p);
    }
    Matrix out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(total));
    Eigen::Index off = 0;
    for (Var p : parts) {
        const auto v = value(p);
        out.middleCols(off, v.cols()) = v;
        off += v.cols();
    }
    return push(std::move(out), [parts](Graph& g, int self) {
        const auto dy = g.grad_of(self);
        Eigen::Index off = 0;
        for (Var p : parts) {
            auto dp = g.grad_ref(p.id);
            dp += dy.middleCols(off, dp.cols());
            off += dp.cols();
        }
    });
}

Var Graph::sum(Var a) {
    Matrix out(1, 1);
    out(0, 0) = value(a).sum();
    return push(std::move(out), [a](Graph& g, int self) {
        g.grad_ref(a.id).array() += g.grad_of(self)(0, 0);
    });
}

Var Graph::sum_squares_half(Var a) {
    Matrix out(1, 1);
    out(0, 0) = 0.5 * value(a).squaredNorm();
    return push(std::move(out), [a](Graph& g, int self) {
        g.grad_ref(a.id) += g.value(a) * g.grad_of(self)(0, 0);
    });
}

Var Graph::elementwise(Var a, std::function<double(double)> f, std::function<double(double)> df) {
    const auto x = value(a);
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) out.data()[i] = f(x.data()[i]);
    return push(std::move(out), [a, df = std::move(df)](Graph& g, int self) {
        const auto x = g.value(a);
        const auto dy = g.grad_of(self);
        auto dx = g.grad_ref(a.id);
        for (Eigen::Index i = 0; i < x.size(); ++i) dx.data()[i] += dy.data()[i] * df(x.data()[i]);
    });
}

Var Graph::cross_entropy(Var logits, std::span<const std::int32_t> targets,
                         std::span<const bool> mask) {
    const auto z = value(logits);
    if (targets.size() != static_cast<std::size_t>(z.rows()))
        throw ValidationError("cross_entropy: targets length differs from logits rows");
    if (!mask.empty() && mask.size() != targets.size())
        throw ValidationError("cross_entropy: mask length differs from targets");
    Matrix probs(z.rows(), z.cols());
    double total = 0;
    std::size_t counted = 0;
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const auto t = targets[static_cast<std::size_t>(r)];
        if (t < 0 || t >= z.cols())
            throw ValidationError("cross_entropy: target id " + std::to_string(t) +
                                  " outside vocabulary of " + std::to_string(z.cols()));
        const double m = z.row(r).maxCoeff();
        probs.row(r) = (z.row(r).array() - m).exp().matrix();
        const double denom = probs.row(r).sum();
        probs.row(r) /= denom;
        if (!mask.empty() && !mask[static_cast<std::size_t>(r)]) continue;
        total += -(z(r, t) - m - std::log(denom));
        ++counted;
    }
    Matrix out(1, 1);
    out(0, 0) = counted ? total / static_cast<double>(counted) : 0.0;
    std::vector<std::int32_t> tv(targets.begin(), targets.end());
    std::vector<bool> mv(mask.begin(), mask.end());
    return push(std::move(out), [logits, probs = std::move(probs), tv = std::move(tv),
                                 mv = std::move(mv), counted](Graph& g, int self) {
        if (!counted) return;
        const double s = g.grad_of(self)(0, 0) / static_cast<double>(counted);
        auto dz = g.grad_ref(logits.id);
        for (Eigen::Index r = 0; r < probs.rows(); ++r) {
            if (!mv.empty() && !mv[static_cast<std::size_t>(r)]) continue;
            dz.row(r) += probs.row(r) * s;
            dz(r, tv[static_cast<std::size_t>(r)]) -= s;
        }
    });
}

void Graph::backward(Var loss) {
    const auto v = value(loss);
    if (v.rows() != 1 || v.cols() != 1) throw ValidationError("backward: loss must be a scalar");
    grad_ref(loss.id)(0, 0) += 1.0;
    for (int i = loss.id; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (n.has_grad && n.backward) n.backward(*this, i);
    }
}

Gradients Graph::parameter_gradients() const {
    if (!params_) return {};
    Gradients g = Gradients::zeros_like(*params_);
    for (std::size_t i = 0; i < param_nodes_.size(); ++i) {
        const int id = param_nodes_[i];
        if (id >= 0 && nodes_[static_cast<std::size_t>(id)].has_grad)
            g.grads[i] = nodes_[static_cast<std::size_t>(id)].grad;
    }
    return g;
}

Matrix Graph::gradient(Var v) const {
    const Node& n = nodes_.at(static_cast<std::size_t>(v.id));
    if (n.has_grad) return n.grad;
    const auto val = value(v);
    return Matrix::Zero(val.rows(), val.cols());
}

} // namespace ctrltab::nn
