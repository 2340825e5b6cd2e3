#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "termlab/net/params.hpp"

namespace termlab::net {

/// Per-parameter gradient buffers, laid out like the store's tensors.
struct Gradients {
    std::vector<std::vector<double>> by_param;

    explicit Gradients(const ParameterStore& store);
    void zero();
    double squared_norm() const;
    void scale(double s);
};

/// Reverse-mode tape over vector-valued nodes (scalars are length-1).
/// Operations that read parameters accumulate directly into parameter
/// gradients; frozen (non-trainable) parameters receive exactly zero.
/// reset() keeps allocated capacity so a tape can be reused per batch.
class Tape {
public:
    explicit Tape(const ParameterStore& params) : params_(&params) {}

    // ---- graph construction (all return node ids) ----
    int constant(std::span<const double> values); // no gradient flows
    int param_ref(int param);                     // whole tensor as a flat vector
    int row(int param, int r);                    // one row of a parameter matrix
    int matvec(int param, int x);                 // tensor(param) * value(x)
    int add(int a, int b);
    int add3(int a, int b, int c);
    int tanh(int a);
    int sigmoid(int a);
    int mul(int a, int b); // pointwise
    int slice(int a, int offset, int len);
    int scale_add(int a, double scale, double shift); // pointwise scale*x + shift

    int dot_row(int param, int r, int x); // scalar: row(param, r) . value(x)

    /// Scalar log softmax(tensor(param) * value(x))[target]; `excluded`
    /// row (-1 for none) is left out of the normalization.
    int log_softmax_pick(int param, int x, TokenId target, TokenId excluded);

    int log_sigmoid(int a);                          // pointwise
    int log1mexp(int a);                             // scalar, input < 0
    int nmst_eos_logprob(int z, std::int64_t t, double eps); // scalar log alpha_t
    int sum(std::span<const int> nodes);             // scalar sum of scalar nodes

    // ---- evaluation ----
    double value(int node) const { return values_[nodes_[static_cast<std::size_t>(node)].off]; }
    std::span<const double> values(int node) const;

    /// Seeds d(node)=1 and accumulates parameter gradients into `out`.
    void backward(int node, Gradients& out);

    void reset();
    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        constant,
        param_ref,
        row,
        matvec,
        add,
        add3,
        tanh_op,
        sigmoid_op,
        mul,
        slice,
        scale_add,
        dot_row,
        log_softmax_pick,
        log_sigmoid_op,
        log1mexp_op,
        nmst_eos,
        sum_many,
    };

    struct Node {
        Op op;
        int a = -1, b = -1, c = -1; // input node ids
        int param = -1;
        int i0 = 0;          // row index / slice offset / target
        int i1 = 0;          // excluded row / multi-input table index
        double x0 = 0.0;     // scale / eps
        double x1 = 0.0;     // shift / t
        std::size_t off = 0; // value slot
        int len = 0;
        std::size_t aux = 0; // offset into aux_ (cached softmax probs)
        int aux_len = 0;
    };

    int push(Node n, int len);
    std::span<double> slot(const Node& n) {
        return {values_.data() + n.off, static_cast<std::size_t>(n.len)};
    }
    std::span<const double> slot(const Node& n) const {
        return {values_.data() + n.off, static_cast<std::size_t>(n.len)};
    }
    std::span<double> grad_slot(const Node& n) {
        return {grads_.data() + n.off, static_cast<std::size_t>(n.len)};
    }
    int node_len(int id) const { return nodes_[static_cast<std::size_t>(id)].len; }

    const ParameterStore* params_;
    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<double> aux_;
    std::vector<std::vector<int>> multi_inputs_;
};

} // namespace termlab::net
