#include "termlab/net/tape.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "termlab/core/logmath.hpp"

namespace termlab::net {

Gradients::Gradients(const ParameterStore& store) {
    by_param.resize(store.count());
    for (std::size_t i = 0; i < store.count(); ++i)
        by_param[i].assign(store.tensor(static_cast<int>(i)).size(), 0.0);
}

void Gradients::zero() {
    for (auto& g : by_param) g.assign(g.size(), 0.0);
}

double Gradients::squared_norm() const {
    double s = 0.0;
    for (const auto& g : by_param)
        for (double x : g) s += x * x;
    return s;
}

void Gradients::scale(double s) {
    for (auto& g : by_param)
        for (double& x : g) x *= s;
}

int Tape::push(Node n, int len) {
    n.off = values_.size();
    n.len = len;
    values_.resize(values_.size() + static_cast<std::size_t>(len), 0.0);
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
}

std::span<const double> Tape::values(int node) const {
    return slot(nodes_[static_cast<std::size_t>(node)]);
}

void Tape::reset() {
    nodes_.clear();
    values_.clear();
    grads_.clear();
    aux_.clear();
    multi_inputs_.clear();
}

int Tape::constant(std::span<const double> values) {
    Node n{};
    n.op = Op::constant;
    int id = push(n, static_cast<int>(values.size()));
    auto out = slot(nodes_.back());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i];
    return id;
}

int Tape::param_ref(int param) {
    const Tensor& t = params_->tensor(param);
    Node n{};
    n.op = Op::param_ref;
    n.param = param;
    int id = push(n, static_cast<int>(t.size()));
    auto out = slot(nodes_.back());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t.data[i];
    return id;
}

int Tape::row(int param, int r) {
    const Tensor& t = params_->tensor(param);
    Node n{};
    n.op = Op::row;
    n.param = param;
    n.i0 = r;
    int id = push(n, t.cols);
    auto out = slot(nodes_.back());
    auto src = t.row(r);
    for (std::size_t i = 0; i < src.size(); ++i) out[i] = src[i];
    return id;
}

int Tape::matvec(int param, int x) {
    const Tensor& w = params_->tensor(param);
    if (w.cols != node_len(x)) throw std::invalid_argument("matvec: shape mismatch");
    Node n{};
    n.op = Op::matvec;
    n.param = param;
    n.a = x;
    int id = push(n, w.rows);
    auto out = slot(nodes_.back());
    auto xs = slot(nodes_[static_cast<std::size_t>(x)]);
    for (int r = 0; r < w.rows; ++r) out[static_cast<std::size_t>(r)] = dot(w.row(r), xs);
    return id;
}

int Tape::add(int a, int b) {
    if (node_len(a) != node_len(b)) throw std::invalid_argument("add: shape mismatch");
    Node n{};
    n.op = Op::add;
    n.a = a;
    n.b = b;
    int id = push(n, node_len(a));
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    auto xb = slot(nodes_[static_cast<std::size_t>(b)]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xa[i] + xb[i];
    return id;
}

int Tape::add3(int a, int b, int c) {
    if (node_len(a) != node_len(b) || node_len(a) != node_len(c))
        throw std::invalid_argument("add3: shape mismatch");
    Node n{};
    n.op = Op::add3;
    n.a = a;
    n.b = b;
    n.c = c;
    int id = push(n, node_len(a));
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    auto xb = slot(nodes_[static_cast<std::size_t>(b)]);
    auto xc = slot(nodes_[static_cast<std::size_t>(c)]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xa[i] + xb[i] + xc[i];
    return id;
}

int Tape::tanh(int a) {
    Node n{};
    n.op = Op::tanh_op;
    n.a = a;
    int id = push(n, node_len(a));
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xa[i]);
    return id;
}

int Tape::sigmoid(int a) {
    Node n{};
    n.op = Op::sigmoid_op;
    n.a = a;
    int id = push(n, node_len(a));
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = termlab::sigmoid(xa[i]);
    return id;
}

int Tape::mul(int a, int b) {
    if (node_len(a) != node_len(b)) throw std::invalid_argument("mul: shape mismatch");
    Node n{};
    n.op = Op::mul;
    n.a = a;
    n.b = b;
    int id = push(n, node_len(a));
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    auto xb = slot(nodes_[static_cast<std::size_t>(b)]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xa[i] * xb[i];
    return id;
}

int Tape::slice(int a, int offset, int len) {
    if (offset < 0 || len < 1 || offset + len > node_len(a))
        throw std::invalid_argument("slice: out of range");
    Node n{};
    n.op = Op::slice;
    n.a = a;
    n.i0 = offset;
    int id = push(n, len);
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    for (int i = 0; i < len; ++i)
        out[static_cast<std::size_t>(i)] = xa[static_cast<std::size_t>(offset + i)];
    return id;
}

int Tape::scale_add(int a, double scale, double shift) {
    Node n{};
    n.op = Op::scale_add;
    n.a = a;
    n.x0 = scale;
    n.x1 = shift;
    int id = push(n, node_len(a));
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * xa[i] + shift;
    return id;
}

int Tape::dot_row(int param, int r, int x) {
    const Tensor& w = params_->tensor(param);
    if (w.cols != node_len(x)) throw std::invalid_argument("dot_row: shape mismatch");
    Node n{};
    n.op = Op::dot_row;
    n.param = param;
    n.i0 = r;
    n.a = x;
    int id = push(n, 1);
    auto xs = slot(nodes_[static_cast<std::size_t>(x)]);
    values_[nodes_.back().off] = dot(w.row(r), xs);
    return id;
}

int Tape::log_softmax_pick(int param, int x, TokenId target, TokenId excluded) {
    const Tensor& w = params_->tensor(param);
    if (w.cols != node_len(x)) throw std::invalid_argument("log_softmax_pick: shape mismatch");
    if (target < 0 || target >= w.rows || target == excluded)
        throw std::invalid_argument("log_softmax_pick: bad target row");
    Node n{};
    n.op = Op::log_softmax_pick;
    n.param = param;
    n.a = x;
    n.i0 = target;
    n.i1 = excluded;
    n.aux = aux_.size();
    n.aux_len = w.rows;
    aux_.resize(aux_.size() + static_cast<std::size_t>(w.rows), 0.0);
    int id = push(n, 1);

    const Node& nd = nodes_.back();
    auto input = slot(nodes_[static_cast<std::size_t>(x)]);
    double* probs = aux_.data() + nd.aux;
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < w.rows; ++r) {
        if (r == excluded) {
            probs[r] = 0.0;
            continue;
        }
        probs[r] = dot(w.row(r), input);
        max_logit = std::max(max_logit, probs[r]);
    }
    double total = 0.0;
    for (int r = 0; r < w.rows; ++r)
        if (r != excluded) total += std::exp(probs[r] - max_logit);
    double lse = max_logit + std::log(total);
    double picked = probs[target] - lse;
    for (int r = 0; r < w.rows; ++r)
        if (r != excluded) probs[r] = std::exp(probs[r] - lse); // cache softmax for backward
    values_[nd.off] = picked;
    return id;
}

int Tape::log_sigmoid(int a) {
    Node n{};
    n.op = Op::log_sigmoid_op;
    n.a = a;
    int id = push(n, node_len(a));
    auto out = slot(nodes_.back());
    auto xa = slot(nodes_[static_cast<std::size_t>(a)]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = termlab::log_sigmoid(xa[i]);
    return id;
}

int Tape::log1mexp(int a) {
    if (node_len(a) != 1) throw std::invalid_argument("log1mexp: scalar input expected");
    Node n{};
    n.op = Op::log1mexp_op;
    n.a = a;
    int id = push(n, 1);
    double xa = values_[nodes_[static_cast<std::size_t>(a)].off];
    assert(xa < 0.0);
    values_[nodes_.back().off] = termlab::log1mexp(xa);
    return id;
}

int Tape::nmst_eos_logprob(int z, std::int64_t t, double eps) {
    if (node_len(z) != 1) throw std::invalid_argument("nmst_eos_logprob: scalar input expected");
    Node n{};
    n.op = Op::nmst_eos;
    n.a = z;
    n.x0 = eps;
    n.x1 = static_cast<double>(t);
    int id = push(n, 1);
    double zv = values_[nodes_[static_cast<std::size_t>(z)].off];
    double log_decay = static_cast<double>(t) * std::log1p(-eps);
    values_[nodes_.back().off] =
        termlab::log1mexp(termlab::log_sigmoid(-zv) + log_decay);
    return id;
}

int Tape::sum(std::span<const int> nodes) {
    if (nodes.empty()) throw std::invalid_argument("sum: no inputs");
    Node n{};
    n.op = Op::sum_many;
    n.i1 = static_cast<int>(multi_inputs_.size());
    multi_inputs_.emplace_back(nodes.begin(), nodes.end());
    int id = push(n, 1);
    double total = 0.0;
    for (int in : multi_inputs_.back()) {
        if (node_len(in) != 1) throw std::invalid_argument("sum: scalar inputs expected");
        total += values_[nodes_[static_cast<std::size_t>(in)].off];
    }
    values_[nodes_.back().off] = total;
    return id;
}

void Tape::backward(int node, Gradients& out) {
    if (out.by_param.size() != params_->count())
        throw std::invalid_argument("backward: gradients shape mismatch");
    grads_.assign(values_.size(), 0.0);
    grads_[nodes_[static_cast<std::size_t>(node)].off] = 1.0;

    for (int id = node; id >= 0; --id) {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        auto g = grad_slot(n);
        bool any = false;
        for (double v : g)
            if (v != 0.0) {
                any = true;
                break;
            }
        if (!any) continue;

        auto in_val = [&](int in) { return slot(nodes_[static_cast<std::size_t>(in)]); };
        auto in_grad = [&](int in) { return grad_slot(nodes_[static_cast<std::size_t>(in)]); };
        const bool train = n.param >= 0 && params_->trainable(n.param);
        double* pgrad = n.param >= 0 ? out.by_param[static_cast<std::size_t>(n.param)].data()
                                     : nullptr;

        switch (n.op) {
            case Op::constant: break;
            case Op::param_ref:
                if (train)
                    for (std::size_t i = 0; i < g.size(); ++i) pgrad[i] += g[i];
                break;
            case Op::row:
                if (train) {
                    const Tensor& t = params_->tensor(n.param);
                    double* row_grad = pgrad + static_cast<std::size_t>(n.i0) * t.cols;
                    for (std::size_t i = 0; i < g.size(); ++i) row_grad[i] += g[i];
                }
                break;
            case Op::matvec: {
                const Tensor& w = params_->tensor(n.param);
                auto xs = in_val(n.a);
                auto xg = in_grad(n.a);
                for (int r = 0; r < w.rows; ++r) {
                    double gr = g[static_cast<std::size_t>(r)];
                    if (gr == 0.0) continue;
                    auto wrow = w.row(r);
                    for (int c = 0; c < w.cols; ++c)
                        xg[static_cast<std::size_t>(c)] += gr * wrow[static_cast<std::size_t>(c)];
                    if (train) {
                        double* wg = pgrad + static_cast<std::size_t>(r) * w.cols;
                        for (int c = 0; c < w.cols; ++c)
                            wg[c] += gr * xs[static_cast<std::size_t>(c)];
                    }
                }
                break;
            }
            case Op::add: {
                auto ga = in_grad(n.a);
                auto gb = in_grad(n.b);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += g[i];
                    gb[i] += g[i];
                }
                break;
            }
            case Op::add3: {
                auto ga = in_grad(n.a);
                auto gb = in_grad(n.b);
                auto gc = in_grad(n.c);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += g[i];
                    gb[i] += g[i];
                    gc[i] += g[i];
                }
                break;
            }
            case Op::tanh_op: {
                auto y = slot(n);
                auto ga = in_grad(n.a);
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case Op::sigmoid_op: {
                auto y = slot(n);
                auto ga = in_grad(n.a);
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
                break;
            }
            case Op::mul: {
                auto xa = in_val(n.a);
                auto xb = in_val(n.b);
                auto ga = in_grad(n.a);
                auto gb = in_grad(n.b);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += g[i] * xb[i];
                    gb[i] += g[i] * xa[i];
                }
                break;
            }
            case Op::slice: {
                auto ga = in_grad(n.a);
                for (std::size_t i = 0; i < g.size(); ++i)
                    ga[static_cast<std::size_t>(n.i0) + i] += g[i];
                break;
            }
            case Op::scale_add: {
                auto ga = in_grad(n.a);
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.x0;
                break;
            }
            case Op::dot_row: {
                const Tensor& w = params_->tensor(n.param);
                auto xs = in_val(n.a);
                auto xg = in_grad(n.a);
                auto wrow = w.row(n.i0);
                double gr = g[0];
                for (int c = 0; c < w.cols; ++c)
                    xg[static_cast<std::size_t>(c)] += gr * wrow[static_cast<std::size_t>(c)];
                if (train) {
                    double* wg = pgrad + static_cast<std::size_t>(n.i0) * w.cols;
                    for (int c = 0; c < w.cols; ++c) wg[c] += gr * xs[static_cast<std::size_t>(c)];
                }
                break;
            }
            case Op::log_softmax_pick: {
                const Tensor& w = params_->tensor(n.param);
                auto xs = in_val(n.a);
                auto xg = in_grad(n.a);
                const double* probs = aux_.data() + n.aux;
                double gr = g[0];
                for (int r = 0; r < w.rows; ++r) {
                    if (r == n.i1) continue;
                    double coeff = (r == n.i0 ? 1.0 : 0.0) - probs[r];
                    if (coeff == 0.0) continue;
                    auto wrow = w.row(r);
                    double scaled = gr * coeff;
                    for (int c = 0; c < w.cols; ++c)
                        xg[static_cast<std::size_t>(c)] +=
                            scaled * wrow[static_cast<std::size_t>(c)];
                    if (train) {
                        double* wg = pgrad + static_cast<std::size_t>(r) * w.cols;
                        for (int c = 0; c < w.cols; ++c)
                            wg[c] += scaled * xs[static_cast<std::size_t>(c)];
                    }
                }
                break;
            }
            case Op::log_sigmoid_op: {
                auto xa = in_val(n.a);
                auto ga = in_grad(n.a);
                for (std::size_t i = 0; i < g.size(); ++i)
                    ga[i] += g[i] * termlab::sigmoid(-xa[i]);
                break;
            }
            case Op::log1mexp_op: {
                double xa = in_val(n.a)[0];
                double y = slot(n)[0];
                in_grad(n.a)[0] += -g[0] * std::exp(xa - y);
                break;
            }
            case Op::nmst_eos: {
                double zv = in_val(n.a)[0];
                double y = slot(n)[0];
                double log_decay = n.x1 * std::log1p(-n.x0);
                // d log(alpha)/dz = sig(z) sig(-z) (1-eps)^t / alpha
                double d = std::exp(termlab::log_sigmoid(zv) + termlab::log_sigmoid(-zv) +
                                    log_decay - y);
                in_grad(n.a)[0] += g[0] * d;
                break;
            }
            case Op::sum_many: {
                for (int in : multi_inputs_[static_cast<std::size_t>(n.i1)])
                    grad_slot(nodes_[static_cast<std::size_t>(in)])[0] += g[0];
                break;
            }
        }
    }
}

} // namespace termlab::net
