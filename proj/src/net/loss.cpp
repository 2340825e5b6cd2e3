#include "termlab/net/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace termlab::net {

namespace {

// Tape-side recurrent state: node ids for each layer's h (and c for lstm).
struct TapeState {
    std::vector<int> h;
    std::vector<int> c;
};

class GraphBuilder {
public:
    GraphBuilder(Tape& tape, const ModelParams& params, double dropout, Rng* rng)
        : tape_(tape), params_(params), dropout_(dropout), rng_(rng) {
        if (dropout_ < 0.0 || dropout_ >= 1.0)
            throw std::invalid_argument("dropout must lie in [0, 1)");
        if (dropout_ > 0.0 && rng_ == nullptr)
            throw std::invalid_argument("dropout requires a generator");
        const Architecture& arch = params_.arch();
        std::vector<double> zeros(static_cast<std::size_t>(arch.hidden), 0.0);
        int zero_node = tape_.constant(zeros);
        state_.h.assign(static_cast<std::size_t>(arch.layers), zero_node);
        if (arch.cell == CellKind::lstm)
            state_.c.assign(static_cast<std::size_t>(arch.layers), zero_node);
    }

    void consume(TokenId token) {
        const Architecture& arch = params_.arch();
        int x = tape_.row(params_.embedding_param(), token);
        for (int l = 0; l < arch.layers; ++l) {
            const auto& ids = params_.layer_params()[static_cast<std::size_t>(l)];
            int pre = tape_.add3(tape_.matvec(ids.w_x, x), tape_.matvec(ids.w_h, layer_h(l)),
                                 tape_.param_ref(ids.b));
            int h;
            if (arch.cell == CellKind::rnn) {
                h = tape_.tanh(pre);
            } else {
                const int hd = arch.hidden;
                int ig = tape_.sigmoid(tape_.slice(pre, 0, hd));
                int fg = tape_.sigmoid(tape_.slice(pre, hd, hd));
                int gg = tape_.tanh(tape_.slice(pre, 2 * hd, hd));
                int og = tape_.sigmoid(tape_.slice(pre, 3 * hd, hd));
                int c = tape_.add(tape_.mul(fg, layer_c(l)), tape_.mul(ig, gg));
                state_.c[static_cast<std::size_t>(l)] = c;
                h = tape_.mul(og, tape_.tanh(c));
            }
            state_.h[static_cast<std::size_t>(l)] = h;
            x = (l + 1 < arch.layers) ? dropped(h) : h;
        }
    }

    /// Top hidden node with the pre-head dropout mask applied.
    int head_input() { return dropped(state_.h.back()); }

private:
    int layer_h(int l) const { return state_.h[static_cast<std::size_t>(l)]; }
    int layer_c(int l) const { return state_.c[static_cast<std::size_t>(l)]; }

    int dropped(int node) {
        if (dropout_ == 0.0) return node;
        const double keep = 1.0 - dropout_;
        std::vector<double> mask(static_cast<std::size_t>(params_.arch().hidden));
        for (double& m : mask) m = rng_->next_double() < dropout_ ? 0.0 : 1.0 / keep;
        return tape_.mul(node, tape_.constant(mask));
    }

    Tape& tape_;
    const ModelParams& params_;
    double dropout_;
    Rng* rng_;
    TapeState state_;
};

} // namespace

SequenceLoss build_sequence_nll(Tape& tape, const ModelParams& params, const Context& context,
                                std::span<const TokenId> target,
                                std::span<const std::uint8_t> mask, double dropout,
                                Rng* dropout_rng) {
    if (target.empty()) throw std::invalid_argument("build_sequence_nll: empty target");
    if (!mask.empty() && mask.size() != target.size())
        throw std::invalid_argument("build_sequence_nll: mask length mismatch");
    const Architecture& arch = params.arch();
    const TokenId eos = params.vocab().eos_id();
    const int head_param = params.head_param();
    const double log_keep_eps = arch.head == heads::HeadKind::va ? 0.0 : std::log1p(-arch.epsilon);

    GraphBuilder builder(tape, params, dropout, dropout_rng);
    for (TokenId tok : context.ids) builder.consume(tok);

    std::vector<int> log_probs;
    int survival = -1; // st head running log-survival node
    std::size_t tokens = 0;

    for (std::size_t t = 0; t < target.size(); ++t) {
        if (!mask.empty() && mask[t] == 0) break; // right-padding suffix
        const TokenId tok = target[t];
        const int h = builder.head_input();
        int lp;
        switch (arch.head) {
            case heads::HeadKind::va:
                lp = tape.log_softmax_pick(head_param, h, tok, -1);
                break;
            case heads::HeadKind::st: {
                int z = tape.dot_row(head_param, eos, h);
                int term = tape.scale_add(tape.log_sigmoid(z), 1.0, log_keep_eps);
                survival = survival < 0 ? term : tape.add(survival, term);
                lp = tok == eos
                         ? tape.log1mexp(survival)
                         : tape.add(survival, tape.log_softmax_pick(head_param, h, tok, eos));
                break;
            }
            case heads::HeadKind::nmst: {
                const auto step = static_cast<std::int64_t>(tokens) + 1;
                int z = tape.dot_row(head_param, eos, h);
                if (tok == eos) {
                    lp = tape.nmst_eos_logprob(z, step, arch.epsilon);
                } else {
                    int log_one_minus_alpha =
                        tape.scale_add(tape.log_sigmoid(tape.scale_add(z, -1.0, 0.0)), 1.0,
                                       static_cast<double>(step) * log_keep_eps);
                    lp = tape.add(log_one_minus_alpha,
                                  tape.log_softmax_pick(head_param, h, tok, eos));
                }
                break;
            }
            default: throw std::logic_error("build_sequence_nll: bad head");
        }
        log_probs.push_back(lp);
        tokens += 1;
        if (t + 1 < target.size() && (mask.empty() || mask[t + 1] != 0)) builder.consume(tok);
    }
    if (log_probs.empty()) throw std::invalid_argument("build_sequence_nll: fully masked target");

    SequenceLoss out;
    out.nll_node = tape.scale_add(tape.sum(log_probs), -1.0, 0.0);
    out.tokens = tokens;
    return out;
}

} // namespace termlab::net
