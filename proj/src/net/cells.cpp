#include "termlab/net/cells.hpp"

#include <cmath>
#include <stdexcept>

#include "termlab/core/logmath.hpp"

namespace termlab::net {

BackboneState initial_backbone_state(const Architecture& arch) {
    BackboneState s;
    s.h.assign(static_cast<std::size_t>(arch.layers),
               std::vector<double>(static_cast<std::size_t>(arch.hidden), 0.0));
    if (arch.cell == CellKind::lstm)
        s.c.assign(static_cast<std::size_t>(arch.layers),
                   std::vector<double>(static_cast<std::size_t>(arch.hidden), 0.0));
    return s;
}

namespace {

// out = W x + U h + b, with W (rows x |x|), U (rows x |h|), b (rows).
void affine(const Tensor& w_x, const Tensor& w_h, const Tensor& b,
            std::span<const double> x, std::span<const double> h, std::vector<double>& out) {
    const int rows = w_x.rows;
    out.assign(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r)
        out[static_cast<std::size_t>(r)] = dot(w_x.row(r), x) + dot(w_h.row(r), h) + b.data[static_cast<std::size_t>(r)];
}

} // namespace

void backbone_consume(const ModelParams& params, TokenId token, BackboneState& state) {
    const Architecture& arch = params.arch();
    if (token < 0 || static_cast<std::size_t>(token) >= params.vocab().size())
        throw std::invalid_argument("backbone_consume: token out of range");
    if (state.h.size() != static_cast<std::size_t>(arch.layers))
        throw std::invalid_argument("backbone_consume: state shape mismatch");

    const Tensor& emb = params.store().tensor(params.embedding_param());
    std::vector<double> input(emb.row(token).begin(), emb.row(token).end());
    std::vector<double> pre;

    for (int l = 0; l < arch.layers; ++l) {
        const auto& ids = params.layer_params()[static_cast<std::size_t>(l)];
        const Tensor& w_x = params.store().tensor(ids.w_x);
        const Tensor& w_h = params.store().tensor(ids.w_h);
        const Tensor& b = params.store().tensor(ids.b);
        auto& h = state.h[static_cast<std::size_t>(l)];
        if (static_cast<int>(input.size()) != w_x.cols ||
            static_cast<int>(h.size()) != arch.hidden)
            throw std::invalid_argument("backbone_consume: layer shape mismatch");

        affine(w_x, w_h, b, input, h, pre);
        if (arch.cell == CellKind::rnn) {
            for (int i = 0; i < arch.hidden; ++i)
                h[static_cast<std::size_t>(i)] = std::tanh(pre[static_cast<std::size_t>(i)]);
        } else {
            auto& c = state.c[static_cast<std::size_t>(l)];
            const int hd = arch.hidden;
            for (int i = 0; i < hd; ++i) {
                double ig = sigmoid(pre[static_cast<std::size_t>(i)]);
                double fg = sigmoid(pre[static_cast<std::size_t>(hd + i)]);
                double gg = std::tanh(pre[static_cast<std::size_t>(2 * hd + i)]);
                double og = sigmoid(pre[static_cast<std::size_t>(3 * hd + i)]);
                double cc = fg * c[static_cast<std::size_t>(i)] + ig * gg;
                c[static_cast<std::size_t>(i)] = cc;
                h[static_cast<std::size_t>(i)] = og * std::tanh(cc);
            }
        }
        input = h;
    }
}

std::pair<std::vector<double>, BackboneState> forward_step(const ModelParams& params,
                                                           TokenId token,
                                                           const BackboneState& state) {
    BackboneState next = state;
    backbone_consume(params, token, next);
    return {next.h.back(), std::move(next)};
}

} // namespace termlab::net
